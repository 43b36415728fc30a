#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "lfm/factor_model.hpp"

namespace lfm {

/// The five ways to turn an edge's endpoint factors into features.
enum class OperatorKind { Avg, Con, Sub, IPneg, IPpos };

std::string_view to_string(OperatorKind kind);
std::optional<OperatorKind> parse_operator(std::string_view name);

/// True for IPneg / IPpos, whose output is used directly as a ranking score.
inline bool is_inner_product(OperatorKind kind) {
    return kind == OperatorKind::IPneg || kind == OperatorKind::IPpos;
}

std::size_t operator_dimension(OperatorKind kind, const FactorModel& model);

std::vector<double> apply_operator(OperatorKind kind, const FactorModel& model, Index user, Index target);

/// Writes into `out`, which must have length operator_dimension(kind, model).
void apply_operator_into(OperatorKind kind, const FactorModel& model, Index user, Index target,
                         std::span<double> out);

}  // namespace lfm
