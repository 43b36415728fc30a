#include "lfm/operators.hpp"

#include <algorithm>

#include "lfm/error.hpp"

namespace lfm {

std::string_view to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::Avg: return "Avg";
        case OperatorKind::Con: return "Con";
        case OperatorKind::Sub: return "Sub";
        case OperatorKind::IPneg: return "IPneg";
        case OperatorKind::IPpos: return "IPpos";
    }
    return "?";
}

std::optional<OperatorKind> parse_operator(std::string_view name) {
    for (auto k : {OperatorKind::Avg, OperatorKind::Con, OperatorKind::Sub, OperatorKind::IPneg,
                   OperatorKind::IPpos}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

std::size_t operator_dimension(OperatorKind kind, const FactorModel& model) {
    const std::size_t dp = model.d_pos(), dn = model.d_neg();
    switch (kind) {
        case OperatorKind::Avg:
        case OperatorKind::Sub:
            if (dp != dn) {
                throw Error(ErrorKind::Dimension, std::string(to_string(kind)) + " requires d_pos == d_neg");
            }
            return kind == OperatorKind::Avg ? dp + dn : 2 * dp;
        case OperatorKind::Con: return 2 * (dp + dn);
        case OperatorKind::IPneg:
        case OperatorKind::IPpos: return 1;
    }
    return 0;
}

void apply_operator_into(OperatorKind kind, const FactorModel& model, Index user, Index target,
                         std::span<double> out) {
    const std::size_t dp = model.d_pos(), dn = model.d_neg();
    auto wp = model.w_pos.row(user), wn = model.w_neg.row(user);
    auto hp = model.h_pos.row(target), hn = model.h_neg.row(target);
    switch (kind) {
        case OperatorKind::Avg:
            // W_u = (W+, W-), H_t = (H+, H-)
            for (std::size_t k = 0; k < dp; ++k) out[k] = 0.5 * (wp[k] + hp[k]);
            for (std::size_t k = 0; k < dn; ++k) out[dp + k] = 0.5 * (wn[k] + hn[k]);
            break;
        case OperatorKind::Con: {
            auto it = std::copy(wp.begin(), wp.end(), out.begin());
            it = std::copy(wn.begin(), wn.end(), it);
            it = std::copy(hp.begin(), hp.end(), it);
            std::copy(hn.begin(), hn.end(), it);
            break;
        }
        case OperatorKind::Sub:
            for (std::size_t k = 0; k < dp; ++k) out[k] = wn[k] - wp[k];
            for (std::size_t k = 0; k < dp; ++k) out[dp + k] = hn[k] - hp[k];
            break;
        case OperatorKind::IPneg: out[0] = dot(wn, hn); break;
        case OperatorKind::IPpos: out[0] = dot(wp, hp); break;
    }
}

std::vector<double> apply_operator(OperatorKind kind, const FactorModel& model, Index user, Index target) {
    std::vector<double> out(operator_dimension(kind, model));
    apply_operator_into(kind, model, user, target, out);
    return out;
}

}  // namespace lfm
