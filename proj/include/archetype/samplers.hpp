#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "archetype/matrix.hpp"

namespace arch {

enum class DistKind { UniformDisk, Gaussian, Annular, GaussianMixture };

struct GaussianParams {
    std::vector<double> mean;
    Matrix cov;  // symmetric positive definite, dim×dim
};

struct AnnularParams {
    double radius_mean = 25.0;
    double radius_var = 50.0;
};

struct DistributionSpec {
    DistKind kind = DistKind::UniformDisk;
    std::vector<GaussianParams> components;  // one for Gaussian, ≥2 for the mixture
    std::vector<double> weights;             // mixture weights, on the simplex
    AnnularParams annular;

    static DistributionSpec uniform_disk();
    static DistributionSpec gaussian(std::vector<double> mean, Matrix cov);
    /// Isotropic shorthand: 𝒩(mean, scale·I).
    static DistributionSpec gaussian_iso(std::vector<double> mean, double scale);
    static DistributionSpec annular_dist(double radius_mean, double radius_var);
    static DistributionSpec mixture(std::vector<GaussianParams> components,
                                    std::vector<double> weights);

    std::size_t dim() const;
    void validate() const;
};

/// d×n matrix of samples, columns are points. Pure in (spec, n, seed):
/// identical arguments give bit-identical output, and the first n columns of
/// a longer draw from the same seed coincide with a shorter one.
Matrix sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// CSV with one point per row. A single leading header row is skipped when
/// its first cell is non-numeric. Ragged or non-numeric data rows are
/// rejected with the offending line number.
Matrix load_csv(const std::string& path);

/// Writes points (columns of m) one per row, 17 significant digits, LF line
/// endings — enough digits that a load round-trips bit-exactly.
void save_csv(const Matrix& m, const std::string& path,
              const std::vector<std::string>& header = {});

std::string format_g17(double x);

}  // namespace arch
