#include "gtlab/noise_model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gtlab {

namespace {

void check_prob(double v, const char* name) {
    // 1.0 is rejected: q = 1 or u = 1 makes every test uninformative.
    if (!(v >= 0.0 && v < 1.0)) {
        throw std::invalid_argument(std::string("NoiseModel: ") + name +
                                    " must lie in [0, 1), got " + std::to_string(v));
    }
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("NoiseModel: bad numeric value '" + s + "'");
    }
    if (pos != s.size()) {
        throw std::invalid_argument("NoiseModel: bad numeric value '" + s + "'");
    }
    return v;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

NoiseModel::NoiseModel(NoiseKind kind, double q, double u) : kind_(kind), q_(q), u_(u) {
    switch (kind_) {
        case NoiseKind::NoiseFree:
            if (q_ != 0.0 || u_ != 0.0) {
                throw std::invalid_argument("NoiseModel: noise-free takes no parameters");
            }
            break;
        case NoiseKind::Addition:
            check_prob(q_, "q");
            if (u_ != 0.0) throw std::invalid_argument("NoiseModel: addition takes no u");
            break;
        case NoiseKind::Dilution:
            check_prob(u_, "u");
            if (q_ != 0.0) throw std::invalid_argument("NoiseModel: dilution takes no q");
            break;
        case NoiseKind::AddDilute:
            check_prob(q_, "q");
            check_prob(u_, "u");
            break;
    }
}

NoiseModel NoiseModel::noise_free() { return NoiseModel(NoiseKind::NoiseFree, 0.0, 0.0); }
NoiseModel NoiseModel::addition(double q) { return NoiseModel(NoiseKind::Addition, q, 0.0); }
NoiseModel NoiseModel::dilution(double u) { return NoiseModel(NoiseKind::Dilution, 0.0, u); }
NoiseModel NoiseModel::add_dilute(double q, double u) {
    return NoiseModel(NoiseKind::AddDilute, q, u);
}

double NoiseModel::positive_prob(int k) const {
    if (k < 0) throw std::invalid_argument("positive_prob: k must be >= 0");
    switch (kind_) {
        case NoiseKind::NoiseFree:
            return k == 0 ? 0.0 : 1.0;
        case NoiseKind::Addition:
            return k == 0 ? q_ : 1.0;
        case NoiseKind::Dilution:
            return k == 0 ? 0.0 : 1.0 - std::pow(u_, k);
        case NoiseKind::AddDilute:
            // Dilution applies first (all k defectives missed with prob u^k),
            // then addition noise fires independently on the diluted result.
            return k == 0 ? q_ : 1.0 - std::pow(u_, k) * (1.0 - q_);
    }
    return 0.0;  // unreachable
}

int NoiseModel::sample_outcome(int k, CounterRng& rng) const {
    return rng.bernoulli(positive_prob(k)) ? 1 : 0;
}

std::string NoiseModel::spec_string() const {
    switch (kind_) {
        case NoiseKind::NoiseFree:
            return "noise-free";
        case NoiseKind::Addition:
            return "addition:q=" + format_param(q_);
        case NoiseKind::Dilution:
            return "dilution:u=" + format_param(u_);
        case NoiseKind::AddDilute:
            return "add-dilute:q=" + format_param(q_) + ",u=" + format_param(u_);
    }
    return {};
}

NoiseModel NoiseModel::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);

    bool have_q = false, have_u = false;
    double q = 0.0, u = 0.0;
    while (!params.empty()) {
        const auto comma = params.find(',');
        const std::string item = params.substr(0, comma);
        params = comma == std::string::npos ? "" : params.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("NoiseModel: expected key=value, got '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        const double val = parse_double(item.substr(eq + 1));
        if (key == "q" && !have_q) {
            q = val;
            have_q = true;
        } else if (key == "u" && !have_u) {
            u = val;
            have_u = true;
        } else {
            throw std::invalid_argument("NoiseModel: unknown or repeated parameter '" + key + "'");
        }
    }

    if (name == "noise-free") {
        if (have_q || have_u) throw std::invalid_argument("NoiseModel: noise-free takes no parameters");
        return noise_free();
    }
    if (name == "addition") {
        if (!have_q || have_u) throw std::invalid_argument("NoiseModel: addition needs exactly q");
        return addition(q);
    }
    if (name == "dilution") {
        if (!have_u || have_q) throw std::invalid_argument("NoiseModel: dilution needs exactly u");
        return dilution(u);
    }
    if (name == "add-dilute") {
        if (!have_q || !have_u) throw std::invalid_argument("NoiseModel: add-dilute needs q and u");
        return add_dilute(q, u);
    }
    throw std::invalid_argument("NoiseModel: unknown model '" + name + "'");
}

}  // namespace gtlab
