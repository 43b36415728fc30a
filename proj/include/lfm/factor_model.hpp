#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lfm/signed_graph.hpp"

namespace lfm {

/// Dense row-major matrix; rows are entity factor vectors.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Signed latent factors: `+` matrices carry normal indications, `-` matrices spam.
struct FactorModel {
    Matrix w_pos;  ///< users x d_pos
    Matrix w_neg;  ///< users x d_neg
    Matrix h_pos;  ///< targets x d_pos
    Matrix h_neg;  ///< targets x d_neg
    double p0 = 0.01;

    std::size_t num_users() const { return w_pos.rows(); }
    std::size_t num_targets() const { return h_pos.rows(); }
    std::size_t d_pos() const { return w_pos.cols(); }
    std::size_t d_neg() const { return w_neg.cols(); }

    Matrix& user_matrix(EdgeLabel level) { return level == EdgeLabel::Spam ? w_neg : w_pos; }
    Matrix& target_matrix(EdgeLabel level) { return level == EdgeLabel::Spam ? h_neg : h_pos; }
    const Matrix& user_matrix(EdgeLabel level) const { return level == EdgeLabel::Spam ? w_neg : w_pos; }
    const Matrix& target_matrix(EdgeLabel level) const { return level == EdgeLabel::Spam ? h_neg : h_pos; }

    /// Raw inner product of the level's user and target rows.
    double inner(EdgeLabel level, Index user, Index target) const {
        return dot(user_matrix(level).row(user), target_matrix(level).row(target));
    }

    bool all_finite() const;
    bool operator==(const FactorModel&) const = default;
};

/// f_a(x) = p0 e^x / (1 + p0 (e^x - 1)), evaluated without overflow.
double activation(double x, double p0);

struct EdgeScore {
    double f_pos;
    double f_neg;
};

EdgeScore edge_scores(const FactorModel& model, Index user, Index target);

FactorModel init_model(std::size_t num_users, std::size_t num_targets, std::size_t d_pos,
                       std::size_t d_neg, double p0, double scale, std::uint64_t seed);

/// `lfm-factors v1` text format; values are written in shortest round-trip form.
void write_model(std::ostream& out, const FactorModel& model);
FactorModel read_model(std::istream& in);

}  // namespace lfm
