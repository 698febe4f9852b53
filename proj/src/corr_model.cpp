#include "maxtail/corr_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace maxtail {

namespace linalg {

void symmetric_eigen(int n, const std::vector<double>& a,
                     std::vector<double>& eigenvalues,
                     std::vector<double>* v) {
    std::vector<double> m = a;
    auto at = [&](int i, int j) -> double& {
        return m[static_cast<size_t>(i) * n + j];
    };
    if (v) {
        v->assign(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) (*v)[static_cast<size_t>(i) * n + i] = 1.0;
    }

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-26 * n * n) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                if (v) {
                    for (int k = 0; k < n; ++k) {
                        double& vkp = (*v)[static_cast<size_t>(k) * n + p];
                        double& vkq = (*v)[static_cast<size_t>(k) * n + q];
                        const double tp = vkp;
                        const double tq = vkq;
                        vkp = c * tp - s * tq;
                        vkq = s * tp + c * tq;
                    }
                }
            }
        }
    }

    eigenvalues.resize(n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = at(i, i);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return diag[x] < diag[y]; });
    for (int i = 0; i < n; ++i) eigenvalues[i] = diag[order[i]];
    if (v) {
        std::vector<double> sorted(static_cast<size_t>(n) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                sorted[static_cast<size_t>(i) * n + j] =
                    (*v)[static_cast<size_t>(i) * n + order[j]];
        *v = std::move(sorted);
    }
}

}  // namespace linalg

double CorrelationModel::rho() const {
    if (!equicorrelated_) {
        throw std::logic_error("rho(): model is not equicorrelated");
    }
    return rho_;
}

double CorrelationModel::entry(int i, int j) const {
    if (equicorrelated_) return i == j ? 1.0 : rho_;
    return m_[static_cast<size_t>(i) * n_ + j];
}

CorrelationModel CorrelationModel::equicorrelated(int n, double rho) {
    if (n < 1) {
        throw std::invalid_argument("equicorrelated: requires n >= 1");
    }
    CorrelationModel model;
    model.n_ = n;
    model.equicorrelated_ = true;
    if (n == 1) {
        model.rho_ = 0.0;  // no off-diagonal entries; rho is ignored
        model.min_eigenvalue_ = 1.0;
        return model;
    }
    const double lo = -1.0 / (n - 1);
    if (!(rho > lo && rho <= 1.0)) {
        throw std::invalid_argument(
            "equicorrelated: rho must lie in (-1/(n-1), 1]");
    }
    model.rho_ = rho;
    // spectrum is {1 + (n-1) rho, 1 - rho (n-1 times)}
    model.min_eigenvalue_ = std::min(1.0 + (n - 1) * rho, 1.0 - rho);
    return model;
}

CorrelationModel CorrelationModel::identity(int n) {
    return equicorrelated(n, 0.0);
}

CorrelationModel CorrelationModel::dense(int n, std::vector<double> row_major) {
    if (n < 1) {
        throw std::invalid_argument("dense: requires n >= 1");
    }
    if (row_major.size() != static_cast<size_t>(n) * n) {
        throw std::invalid_argument("dense: matrix size does not match n");
    }
    CorrelationModel model;
    model.n_ = n;
    model.m_ = std::move(row_major);
    model.validate_dense();
    return model;
}

void CorrelationModel::validate_dense() {
    const double tol = 1e-12;
    for (int i = 0; i < n_; ++i) {
        if (std::fabs(entry(i, i) - 1.0) > tol) {
            throw std::invalid_argument("correlation matrix: diagonal entry " +
                                        std::to_string(i) + " is not 1");
        }
        for (int j = 0; j < n_; ++j) {
            const double e = entry(i, j);
            if (!std::isfinite(e) || std::fabs(e) > 1.0 + tol) {
                throw std::invalid_argument(
                    "correlation matrix: entry (" + std::to_string(i) + "," +
                    std::to_string(j) + ") outside [-1, 1]");
            }
            if (std::fabs(e - entry(j, i)) > tol) {
                throw std::invalid_argument(
                    "correlation matrix: not symmetric at (" +
                    std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    std::vector<double> eig;
    linalg::symmetric_eigen(n_, m_, eig, nullptr);
    min_eigenvalue_ = eig.front();
    if (min_eigenvalue_ < -1e-10 * n_) {
        throw std::invalid_argument(
            "correlation matrix: not positive semidefinite (min eigenvalue " +
            std::to_string(min_eigenvalue_) + ")");
    }
}

CorrelationModel CorrelationModel::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        int col = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            ++col;
            std::string tok = line.substr(pos, comma - pos);
            // trim spaces
            const auto b = tok.find_first_not_of(" \t\r");
            const auto e = tok.find_last_not_of(" \t\r");
            if (b == std::string::npos) {
                throw std::runtime_error("matrix csv: empty field at row " +
                                         std::to_string(line_no) +
                                         ", column " + std::to_string(col));
            }
            tok = tok.substr(b, e - b + 1);
            double value = 0.0;
            const auto res =
                std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
                throw std::runtime_error("matrix csv: cannot parse '" + tok +
                                         "' at row " + std::to_string(line_no) +
                                         ", column " + std::to_string(col));
            }
            row.push_back(value);
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("matrix csv: file is empty: " + path);
    }
    const size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw std::runtime_error(
                "matrix csv: row " + std::to_string(i + 1) + " has " +
                std::to_string(rows[i].size()) + " entries, expected " +
                std::to_string(n));
        }
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return dense(static_cast<int>(n), std::move(flat));
}

CorrelationModel::OffDiagonalExtremes CorrelationModel::max_offdiag() const {
    OffDiagonalExtremes ext;
    if (n_ == 1) {
        ext.signed_max = -std::numeric_limits<double>::infinity();
        ext.abs_max = -std::numeric_limits<double>::infinity();
        ext.defined = false;
        return ext;
    }
    ext.defined = true;
    if (equicorrelated_) {
        ext.signed_max = rho_;
        ext.abs_max = std::fabs(rho_);
        return ext;
    }
    ext.signed_max = -std::numeric_limits<double>::infinity();
    ext.abs_max = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const double e = entry(i, j);
            ext.signed_max = std::max(ext.signed_max, e);
            ext.abs_max = std::max(ext.abs_max, std::fabs(e));
        }
    }
    return ext;
}

CorrelationModel::SamplingFactor CorrelationModel::sampling_factor() const {
    std::vector<double> full;
    if (equicorrelated_) {
        full.assign(static_cast<size_t>(n_) * n_, rho_);
        for (int i = 0; i < n_; ++i) full[static_cast<size_t>(i) * n_ + i] = 1.0;
    } else {
        full = m_;
    }
    std::vector<double> eig;
    std::vector<double> vec;
    linalg::symmetric_eigen(n_, full, eig, &vec);
    if (eig.front() < -1e-6) {
        throw std::invalid_argument(
            "sampling_factor: matrix is not positive semidefinite");
    }
    const double clip = 1e-10 * n_;
    std::vector<int> keep;
    for (int j = 0; j < n_; ++j) {
        if (eig[j] > clip) keep.push_back(j);
    }
    SamplingFactor factor;
    factor.rows = n_;
    factor.cols = static_cast<int>(keep.size());
    factor.a.resize(static_cast<size_t>(n_) * keep.size());
    for (int i = 0; i < n_; ++i) {
        for (size_t j = 0; j < keep.size(); ++j) {
            const int col = keep[j];
            factor.a[static_cast<size_t>(i) * keep.size() + j] =
                vec[static_cast<size_t>(i) * n_ + col] * std::sqrt(eig[col]);
        }
    }
    return factor;
}

CorrelationModel::ResidualVariances CorrelationModel::residual_variances()
    const {
    ResidualVariances rv;
    rv.var.resize(n_);
    if (equicorrelated_) {
        // conditional variance given k predecessors:
        // 1 - k rho^2 / (1 + (k-1) rho)
        for (int i = 0; i < n_; ++i) {
            const double k = static_cast<double>(i);
            if (i == 0) {
                rv.var[i] = 1.0;
                continue;
            }
            const double denom = 1.0 + (k - 1.0) * rho_;
            double v = denom > 0.0 ? 1.0 - k * rho_ * rho_ / denom : 0.0;
            rv.var[i] = v > 1e-14 ? v : 0.0;
        }
    } else {
        // pivoting-free Cholesky; a singular leading minor zeroes the
        // pivot and the rest of its column
        std::vector<double> low(static_cast<size_t>(n_) * n_, 0.0);
        auto lo = [&](int i, int j) -> double& {
            return low[static_cast<size_t>(i) * n_ + j];
        };
        for (int i = 0; i < n_; ++i) {
            double d = entry(i, i);
            for (int k = 0; k < i; ++k) d -= lo(i, k) * lo(i, k);
            if (d <= 1e-14) {
                rv.var[i] = 0.0;
                continue;  // L_ii stays 0, column below treated as 0
            }
            rv.var[i] = d;
            lo(i, i) = std::sqrt(d);
            for (int j = i + 1; j < n_; ++j) {
                double s = entry(j, i);
                for (int k = 0; k < i; ++k) s -= lo(j, k) * lo(i, k);
                lo(j, i) = s / lo(i, i);
            }
        }
    }
    rv.sigma_n_sq = *std::min_element(rv.var.begin(), rv.var.end());
    return rv;
}

std::vector<int> CorrelationModel::find_low_correlation_subset(
    double rho_tilde) const {
    if (!(rho_tilde > 0.0 && rho_tilde < 1.0)) {
        throw std::domain_error(
            "find_low_correlation_subset: rho_tilde must lie in (0, 1)");
    }
    std::vector<double> row_max(n_, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i != j) row_max[i] = std::max(row_max[i], entry(i, j));
        }
    }
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return row_max[x] < row_max[y];
    });
    std::vector<int> subset;
    for (int idx : order) {
        bool ok = true;
        for (int j : subset) {
            if (entry(idx, j) > rho_tilde) {
                ok = false;
                break;
            }
        }
        if (ok) subset.push_back(idx);
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

}  // namespace maxtail
