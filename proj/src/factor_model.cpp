#include "lfm/factor_model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "lfm/error.hpp"
#include "lfm/random.hpp"

namespace lfm {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

bool FactorModel::all_finite() const {
    for (const Matrix* m : {&w_pos, &w_neg, &h_pos, &h_neg}) {
        for (double v : m->data()) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

double activation(double x, double p0) {
    if (x > 0.0) {
        // Same function divided through by p0 e^x.
        return 1.0 / (1.0 + ((1.0 - p0) / p0) * std::exp(-x));
    }
    const double ex = std::exp(x);
    return p0 * ex / (1.0 - p0 + p0 * ex);
}

EdgeScore edge_scores(const FactorModel& model, Index user, Index target) {
    return {activation(model.inner(EdgeLabel::Normal, user, target), model.p0),
            activation(model.inner(EdgeLabel::Spam, user, target), model.p0)};
}

FactorModel init_model(std::size_t num_users, std::size_t num_targets, std::size_t d_pos,
                       std::size_t d_neg, double p0, double scale, std::uint64_t seed) {
    if (d_pos == 0 || d_neg == 0) throw Error(ErrorKind::Dimension, "factor dimensions must be >= 1");
    if (!(scale > 0.0)) throw Error(ErrorKind::Range, "init scale must be > 0");
    if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::Range, "p0 must be in (0, 1)");
    FactorModel m{Matrix(num_users, d_pos), Matrix(num_users, d_neg), Matrix(num_targets, d_pos),
                  Matrix(num_targets, d_neg), p0};
    Rng rng(seed);
    // uniform_real_distribution yields [-scale, scale); redraw the closed endpoint.
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Matrix* mat : {&m.w_pos, &m.w_neg, &m.h_pos, &m.h_neg}) {
        for (double& v : mat->data()) {
            do {
                v = dist(rng);
            } while (v == -scale);
        }
    }
    return m;
}

namespace {

void write_double(std::ostream& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
}

void write_rows(std::ostream& out, const Matrix& m, char entity, char sign) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << entity << '\t' << sign << '\t' << r << '\t';
        auto row = m.row(r);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ' ';
            write_double(out, row[k]);
        }
        out << '\n';
    }
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Parse, "bad number '" + std::string(s) + "' in model file");
    }
    return v;
}

std::size_t header_field(const std::string& header, const std::string& key) {
    auto pos = header.find(" " + key + "=");
    if (pos == std::string::npos) throw Error(ErrorKind::Parse, "model header missing " + key);
    return pos + key.size() + 2;
}

}  // namespace

void write_model(std::ostream& out, const FactorModel& model) {
    out << "lfm-factors v1 users=" << model.num_users() << " targets=" << model.num_targets()
        << " dpos=" << model.d_pos() << " dneg=" << model.d_neg() << " p0=";
    write_double(out, model.p0);
    out << '\n';
    write_rows(out, model.w_pos, 'U', '+');
    write_rows(out, model.w_neg, 'U', '-');
    write_rows(out, model.h_pos, 'T', '+');
    write_rows(out, model.h_neg, 'T', '-');
}

FactorModel read_model(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("lfm-factors v1", 0) != 0) {
        throw Error(ErrorKind::Parse, "not an lfm-factors v1 file");
    }
    auto read_count = [&](const std::string& key) {
        std::istringstream ss(header.substr(header_field(header, key)));
        std::size_t v = 0;
        if (!(ss >> v)) throw Error(ErrorKind::Parse, "bad model header field " + key);
        return v;
    };
    std::size_t users = read_count("users"), targets = read_count("targets");
    std::size_t dpos = read_count("dpos"), dneg = read_count("dneg");
    auto p0_start = header_field(header, "p0");
    auto p0_end = header.find(' ', p0_start);
    double p0 = parse_double(std::string_view(header).substr(p0_start, p0_end - p0_start));

    FactorModel m{Matrix(users, dpos), Matrix(users, dneg), Matrix(targets, dpos), Matrix(targets, dneg), p0};
    std::vector<bool> seen_rows[4] = {std::vector<bool>(users), std::vector<bool>(users),
                                      std::vector<bool>(targets), std::vector<bool>(targets)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (in.eof()) throw Error(ErrorKind::Parse, "model file is truncated");
        std::istringstream ss(line);
        std::string entity, sign, index_tok, values;
        if (!std::getline(ss, entity, '\t') || !std::getline(ss, sign, '\t') ||
            !std::getline(ss, index_tok, '\t') || !std::getline(ss, values)) {
            throw Error(ErrorKind::Parse, "malformed model row");
        }
        int which = -1;
        if (entity == "U" && sign == "+") which = 0;
        if (entity == "U" && sign == "-") which = 1;
        if (entity == "T" && sign == "+") which = 2;
        if (entity == "T" && sign == "-") which = 3;
        if (which < 0) throw Error(ErrorKind::Parse, "bad model row tag " + entity + "/" + sign);
        Matrix* mats[4] = {&m.w_pos, &m.w_neg, &m.h_pos, &m.h_neg};
        Matrix& mat = *mats[which];
        std::size_t r = static_cast<std::size_t>(parse_double(index_tok));
        if (r >= mat.rows()) throw Error(ErrorKind::Parse, "model row index out of range");
        if (seen_rows[which][r]) throw Error(ErrorKind::Parse, "duplicate model row");
        seen_rows[which][r] = true;
        auto row = mat.row(r);
        std::size_t k = 0, start = 0;
        while (start <= values.size()) {
            auto end = values.find(' ', start);
            if (end == std::string::npos) end = values.size();
            if (k >= row.size()) throw Error(ErrorKind::Parse, "model row too long");
            row[k++] = parse_double(std::string_view(values).substr(start, end - start));
            start = end + 1;
        }
        if (k != row.size()) throw Error(ErrorKind::Parse, "model row too short");
    }
    for (const auto& seen : seen_rows) {
        for (bool s : seen) {
            if (!s) throw Error(ErrorKind::Parse, "model file is missing rows");
        }
    }
    return m;
}

}  // namespace lfm
