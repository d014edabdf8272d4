#include "archetype/samplers.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "archetype/rng.hpp"

namespace arch {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Lower-triangular L with L·Lᵀ = spd; throws if the matrix is not PD.
Matrix cholesky(const Matrix& spd) {
    const std::size_t n = spd.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = spd(j, j);
        for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
        if (!(diag > 0.0)) {
            throw std::invalid_argument("covariance matrix is not positive definite");
        }
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = spd(i, j);
            for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

// Uniforms reserved per point, fixed by the spec so that draws are
// addressable by point index (prefix property).
std::size_t draws_per_point(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::UniformDisk:
            return 2;
        case DistKind::Annular:
            return 3;  // θ plus one Box–Muller pair
        case DistKind::Gaussian:
            return 2 * ((spec.dim() + 1) / 2);
        case DistKind::GaussianMixture:
            return 1 + 2 * ((spec.dim() + 1) / 2);
    }
    return 0;
}

void fill_standard_normals(CounterRng& rng, std::vector<double>& z) {
    for (std::size_t i = 0; i < z.size(); i += 2) {
        const auto [a, b] = rng.next_normal_pair();
        z[i] = a;
        if (i + 1 < z.size()) z[i + 1] = b;
    }
}

void write_gaussian_point(const GaussianParams& g, const Matrix& chol, CounterRng& rng,
                          double* out) {
    const std::size_t d = g.mean.size();
    std::vector<double> z(d);
    fill_standard_normals(rng, z);
    for (std::size_t i = 0; i < d; ++i) {
        double s = g.mean[i];
        for (std::size_t j = 0; j <= i; ++j) s += chol(i, j) * z[j];
        out[i] = s;
    }
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    for (std::string& s : cells) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }
    return cells;
}

}  // namespace

DistributionSpec DistributionSpec::uniform_disk() {
    DistributionSpec s;
    s.kind = DistKind::UniformDisk;
    return s;
}

DistributionSpec DistributionSpec::gaussian(std::vector<double> mean, Matrix cov) {
    DistributionSpec s;
    s.kind = DistKind::Gaussian;
    s.components.push_back({std::move(mean), std::move(cov)});
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::gaussian_iso(std::vector<double> mean, double scale) {
    Matrix cov(mean.size(), mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) cov(i, i) = scale;
    return gaussian(std::move(mean), std::move(cov));
}

DistributionSpec DistributionSpec::annular_dist(double radius_mean, double radius_var) {
    DistributionSpec s;
    s.kind = DistKind::Annular;
    s.annular = {radius_mean, radius_var};
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::mixture(std::vector<GaussianParams> components,
                                           std::vector<double> weights) {
    DistributionSpec s;
    s.kind = DistKind::GaussianMixture;
    s.components = std::move(components);
    s.weights = std::move(weights);
    s.validate();
    return s;
}

std::size_t DistributionSpec::dim() const {
    switch (kind) {
        case DistKind::UniformDisk:
        case DistKind::Annular:
            return 2;
        default:
            return components.empty() ? 0 : components.front().mean.size();
    }
}

void DistributionSpec::validate() const {
    switch (kind) {
        case DistKind::UniformDisk:
            return;
        case DistKind::Annular:
            if (!(annular.radius_var > 0.0)) {
                throw std::invalid_argument("annular: radius variance must be positive");
            }
            return;
        case DistKind::Gaussian:
            if (components.size() != 1) {
                throw std::invalid_argument("gaussian: exactly one component expected");
            }
            break;
        case DistKind::GaussianMixture: {
            if (components.size() < 2) {
                throw std::invalid_argument("mixture: needs at least two components");
            }
            if (weights.size() != components.size()) {
                throw std::invalid_argument("mixture: one weight per component required");
            }
            double s = 0.0;
            for (double w : weights) {
                if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-9) {
                throw std::invalid_argument("mixture: weights must sum to 1");
            }
            break;
        }
    }
    const std::size_t d = components.front().mean.size();
    for (const GaussianParams& g : components) {
        if (g.mean.size() != d) {
            throw std::invalid_argument("gaussian components disagree on dimension");
        }
        if (g.cov.rows() != d || g.cov.cols() != d) {
            throw std::invalid_argument("covariance shape does not match mean dimension");
        }
        g.cov.require_finite("covariance");
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (std::abs(g.cov(i, j) - g.cov(j, i)) > 1e-12) {
                    throw std::invalid_argument("covariance matrix is not symmetric");
                }
        cholesky(g.cov);  // PD check
    }
}

Matrix sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
    spec.validate();
    const std::size_t d = spec.dim();
    const std::size_t window = draws_per_point(spec);

    std::vector<Matrix> chol;
    for (const GaussianParams& g : spec.components) chol.push_back(cholesky(g.cov));

    Matrix x(d, n);
    CounterRng rng(seed, /*stream=*/0);
    for (std::size_t i = 0; i < n; ++i) {
        rng.seek(i * window);
        double* out = x.col_data(i);
        switch (spec.kind) {
            case DistKind::UniformDisk: {
                const double r = rng.next_unit();
                const double theta = rng.next_unit();
                out[0] = std::sqrt(r) * std::cos(kTwoPi * theta);
                out[1] = std::sqrt(r) * std::sin(kTwoPi * theta);
                break;
            }
            case DistKind::Annular: {
                const double theta = rng.next_unit();
                const double r = spec.annular.radius_mean +
                                 std::sqrt(spec.annular.radius_var) * rng.next_normal();
                const double rad = std::sqrt(std::abs(r));
                out[0] = rad * std::cos(kTwoPi * theta);
                out[1] = rad * std::sin(kTwoPi * theta);
                break;
            }
            case DistKind::Gaussian:
                write_gaussian_point(spec.components[0], chol[0], rng, out);
                break;
            case DistKind::GaussianMixture: {
                const double pick = rng.next_unit();
                std::size_t comp = 0;
                double acc = 0.0;
                for (std::size_t c = 0; c < spec.weights.size(); ++c) {
                    acc += spec.weights[c];
                    if (pick < acc) {
                        comp = c;
                        break;
                    }
                    comp = c;  // lands on the last component when pick ≈ 1
                }
                write_gaussian_point(spec.components[comp], chol[comp], rng, out);
                break;
            }
        }
    }
    return x;
}

Matrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            // Allow trailing blank lines only.
            std::string rest;
            while (std::getline(in, rest)) {
                ++lineno;
                if (!rest.empty() && rest != "\r") {
                    throw std::runtime_error("load_csv: blank line " +
                                             std::to_string(lineno - 1) + " inside data");
                }
            }
            break;
        }
        const std::vector<std::string> cells = split_csv_line(line);
        std::vector<double> vals(cells.size());
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], vals[c])) {
                if (first_data_line) {
                    numeric = false;  // header row
                    break;
                }
                throw std::runtime_error("load_csv: non-numeric cell at line " +
                                         std::to_string(lineno) + ", column " +
                                         std::to_string(c + 1));
            }
            if (!std::isfinite(vals[c])) {
                throw std::runtime_error("load_csv: non-finite value at line " +
                                         std::to_string(lineno) + ", column " +
                                         std::to_string(c + 1));
            }
        }
        if (!numeric) {
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        if (width == 0) {
            width = vals.size();
        } else if (vals.size() != width) {
            throw std::runtime_error("load_csv: line " + std::to_string(lineno) + " has " +
                                     std::to_string(vals.size()) + " columns, expected " +
                                     std::to_string(width));
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in '" + path + "'");

    Matrix m(width, rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < width; ++i) m(i, j) = rows[j][i];
    return m;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void save_csv(const Matrix& m, const std::string& path,
              const std::vector<std::string>& header) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
    if (!header.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out << ',';
            out << header[i];
        }
        out << '\n';
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i) out << ',';
            out << format_g17(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace arch
