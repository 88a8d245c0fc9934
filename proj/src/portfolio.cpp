#include "mvpareto/portfolio.hpp"

#include "mvpareto/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvpareto {

ExposureMatrix::ExposureMatrix(const std::vector<std::vector<int>>& rows) : n_(rows.size()) {
    if (n_ == 0) {
        throw ModelError("exposure matrix must have at least one row");
    }
    entries_.reserve(n_ * (n_ + 1));
    for (std::size_t i = 0; i < n_; ++i) {
        const auto& row = rows[i];
        if (row.size() != n_ + 1) {
            throw ModelError("exposure matrix row " + std::to_string(i + 1) + " has " +
                             std::to_string(row.size()) + " entries, expected " +
                             std::to_string(n_ + 1));
        }
        bool any = false;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] != 0 && row[j] != 1) {
                throw ModelError("exposure matrix entry (" + std::to_string(i + 1) + ", " +
                                 std::to_string(j + 1) + ") is not 0/1");
            }
            any = any || row[j] == 1;
            entries_.push_back(static_cast<std::uint8_t>(row[j]));
        }
        if (!any) {
            throw ModelError("exposure matrix row " + std::to_string(i + 1) +
                             " is all zeros (margin would never be hit)");
        }
    }
}

bool ExposureMatrix::column_empty(std::size_t j) const {
    for (std::size_t i = 1; i <= n_; ++i) {
        if ((*this)(i, j)) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> ExposureMatrix::rows() const {
    std::vector<std::vector<int>> out(n_, std::vector<int>(n_ + 1));
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= n_; ++j) {
            out[i][j] = entries_[i * (n_ + 1) + j];
        }
    }
    return out;
}

Preset parse_preset(std::string_view name) {
    if (name == "arnold") return Preset::arnold;
    if (name == "independent") return Preset::independent;
    if (name == "flexible_I") return Preset::flexible_I;
    if (name == "flexible_II") return Preset::flexible_II;
    if (name == "example_1_3") return Preset::example_1_3;
    throw ModelError("unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset kind) {
    switch (kind) {
    case Preset::arnold: return "arnold";
    case Preset::independent: return "independent";
    case Preset::flexible_I: return "flexible_I";
    case Preset::flexible_II: return "flexible_II";
    case Preset::example_1_3: return "example_1_3";
    }
    return "unknown";
}

ExposureMatrix preset_matrix(Preset kind, std::size_t n) {
    if (n == 0) {
        throw ModelError("preset dimension must be positive");
    }
    std::vector<std::vector<int>> rows(n, std::vector<int>(n + 1, 0));
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = rows[i];
        switch (kind) {
        case Preset::arnold:
            std::fill(row.begin(), row.end(), 1);
            break;
        case Preset::independent:
            row[i] = 1;
            break;
        case Preset::flexible_I:
            row[i] = 1;
            row[n] = 1;
            break;
        case Preset::flexible_II:
            for (std::size_t j = 0; j <= i; ++j) row[j] = 1;
            break;
        case Preset::example_1_3:
            for (std::size_t j = 0; j <= i; ++j) row[j] = 1;
            row[n] = 1;
            break;
        }
    }
    return ExposureMatrix(rows);
}

ExposurePortfolio::ExposurePortfolio(ExposureMatrix c, std::vector<double> sigma,
                                     std::vector<double> gamma)
    : c_(std::move(c)), sigma_(std::move(sigma)), gamma_(std::move(gamma)) {
    const std::size_t n = c_.margins();
    if (sigma_.size() != n) {
        throw ModelError("sigma has " + std::to_string(sigma_.size()) + " entries, expected " +
                         std::to_string(n));
    }
    if (gamma_.size() != n + 1) {
        throw ModelError("gamma has " + std::to_string(gamma_.size()) + " entries, expected " +
                         std::to_string(n + 1));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma_[i] > 0.0) || !std::isfinite(sigma_[i])) {
            throw ModelError("sigma[" + std::to_string(i + 1) + "] must be positive and finite");
        }
    }
    for (std::size_t j = 0; j <= n; ++j) {
        if (!(gamma_[j] > 0.0) || !std::isfinite(gamma_[j])) {
            throw ModelError("gamma[" + std::to_string(j + 1) + "] must be positive and finite");
        }
    }
    marginal_index_.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        double total = 0.0;
        for (std::size_t j = 1; j <= n + 1; ++j) {
            if (c_(i, j)) total += gamma_[j - 1];
        }
        marginal_index_[i - 1] = total;
    }
}

ExposurePortfolio ExposurePortfolio::build(std::vector<std::vector<int>> c,
                                           std::vector<double> sigma, std::vector<double> gamma) {
    return build(ExposureMatrix(c), std::move(sigma), std::move(gamma));
}

ExposurePortfolio ExposurePortfolio::build(ExposureMatrix c, std::vector<double> sigma,
                                           std::vector<double> gamma) {
    return ExposurePortfolio(std::move(c), std::move(sigma), std::move(gamma));
}

ExposurePortfolio ExposurePortfolio::preset(Preset kind, std::size_t n, std::vector<double> sigma,
                                            std::vector<double> gamma) {
    return build(preset_matrix(kind, n), std::move(sigma), std::move(gamma));
}

void ExposurePortfolio::check_margin(std::size_t i, const char* what) const {
    if (i < 1 || i > dimension()) {
        throw ModelError(std::string(what) + ": coordinate " + std::to_string(i) +
                         " out of range 1.." + std::to_string(dimension()));
    }
}

double ExposurePortfolio::sigma(std::size_t i) const {
    check_margin(i, "sigma");
    return sigma_[i - 1];
}

double ExposurePortfolio::gamma(std::size_t j) const {
    if (j < 1 || j > factors()) {
        throw ModelError("gamma: factor " + std::to_string(j) + " out of range");
    }
    return gamma_[j - 1];
}

double ExposurePortfolio::marginal_index(std::size_t i) const {
    check_margin(i, "marginal_index");
    return marginal_index_[i - 1];
}

PairDecomposition ExposurePortfolio::pair_decomposition(std::size_t k, std::size_t l) const {
    check_margin(k, "pair_decomposition");
    check_margin(l, "pair_decomposition");
    if (k == l) {
        throw ModelError("pair_decomposition requires distinct coordinates");
    }
    PairDecomposition out;
    for (std::size_t j = 1; j <= factors(); ++j) {
        const bool hk = c_(k, j), hl = c_(l, j);
        if (hk && hl) out.shared += gamma_[j - 1];
        else if (hk) out.only_k += gamma_[j - 1];
        else if (hl) out.only_l += gamma_[j - 1];
    }
    return out;
}

ExposurePortfolio ExposurePortfolio::scaled(double factor) const {
    std::vector<double> sigma = sigma_;
    for (double& s : sigma) s *= factor;
    return ExposurePortfolio(c_, std::move(sigma), gamma_);
}

} // namespace mvpareto
