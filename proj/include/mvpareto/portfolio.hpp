#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvpareto {

/// Dense n x (n+1) matrix over {0,1}: row i says which risk factors hit margin i.
class ExposureMatrix {
public:
    ExposureMatrix() = default;
    /// Throws ModelError (naming the row/column) on non-0/1 entries, ragged or
    /// wrongly sized rows, or a row without any exposure.
    explicit ExposureMatrix(const std::vector<std::vector<int>>& rows);

    std::size_t margins() const { return n_; }
    std::size_t factors() const { return n_ + 1; }
    /// 1-based access.
    bool operator()(std::size_t i, std::size_t j) const {
        return entries_[(i - 1) * (n_ + 1) + (j - 1)] != 0;
    }
    /// Factor j is hit by no margin at all.
    bool column_empty(std::size_t j) const;
    std::vector<std::vector<int>> rows() const;

    friend bool operator==(const ExposureMatrix&, const ExposureMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> entries_;
};

/// Shape masses of a coordinate pair (k, l): factors hitting both, only k, only l.
struct PairDecomposition {
    double shared = 0.0;
    double only_k = 0.0;
    double only_l = 0.0;
};

enum class Preset { arnold, independent, flexible_I, flexible_II, example_1_3 };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset kind);

/// Immutable multivariate Pareto-II model: exposure matrix c, margin scales
/// sigma (n values) and factor shapes gamma (n+1 values).
class ExposurePortfolio {
public:
    /// Validates every invariant; throws ModelError with the offending index.
    static ExposurePortfolio build(std::vector<std::vector<int>> c, std::vector<double> sigma,
                                   std::vector<double> gamma);
    static ExposurePortfolio build(ExposureMatrix c, std::vector<double> sigma,
                                   std::vector<double> gamma);
    static ExposurePortfolio preset(Preset kind, std::size_t n, std::vector<double> sigma,
                                    std::vector<double> gamma);

    std::size_t dimension() const { return c_.margins(); }
    std::size_t factors() const { return c_.factors(); }
    const ExposureMatrix& exposure() const { return c_; }
    bool exposed(std::size_t i, std::size_t j) const { return c_(i, j); }

    /// 1-based.
    double sigma(std::size_t i) const;
    double gamma(std::size_t j) const;
    std::span<const double> sigmas() const { return sigma_; }
    std::span<const double> gammas() const { return gamma_; }

    /// Tail index of margin i: sum_j c_ij gamma_j.
    double marginal_index(std::size_t i) const;
    /// Throws ModelError when k == l or either index is out of range.
    PairDecomposition pair_decomposition(std::size_t k, std::size_t l) const;

    /// Same exposure and shapes with every scale multiplied by `factor`.
    ExposurePortfolio scaled(double factor) const;

private:
    ExposurePortfolio(ExposureMatrix c, std::vector<double> sigma, std::vector<double> gamma);
    void check_margin(std::size_t i, const char* what) const;

    ExposureMatrix c_;
    std::vector<double> sigma_;
    std::vector<double> gamma_;
    std::vector<double> marginal_index_;
};

/// 0/1 pattern emitted by a preset for dimension n.
ExposureMatrix preset_matrix(Preset kind, std::size_t n);

} // namespace mvpareto
