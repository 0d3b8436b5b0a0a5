#include "gtlab/design.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace gtlab {

namespace {

int ceil_log2(int m) {
    int d = 0;
    while ((1 << d) < m) ++d;
    return d;
}

double parse_double_field(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("Strategy: bad numeric value '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("Strategy: bad numeric value '" + s + "'");
    return v;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

TestMatrix::TestMatrix(int n_items, int n_tests) : n_items_(n_items), n_tests_(n_tests) {
    if (n_items < 0 || n_tests < 0) throw std::invalid_argument("TestMatrix: negative dimension");
    bits_.assign(static_cast<std::size_t>(n_items) * static_cast<std::size_t>(n_tests), 0);
}

void TestMatrix::set(int item, int test, std::uint8_t bit) {
    if (item < 0 || item >= n_items_ || test < 0 || test >= n_tests_) {
        throw std::out_of_range("TestMatrix::set: index out of range");
    }
    bits_[static_cast<std::size_t>(test) * static_cast<std::size_t>(n_items_) +
          static_cast<std::size_t>(item)] = bit ? 1 : 0;
}

void TestMatrix::append_pool(std::span<const std::uint8_t> pool) {
    if (static_cast<int>(pool.size()) != n_items_) {
        throw std::invalid_argument("TestMatrix::append_pool: pool length != n_items");
    }
    bits_.insert(bits_.end(), pool.begin(), pool.end());
    ++n_tests_;
}

int TestMatrix::defectives_in_pool(int test, std::span<const int> members) const {
    int count = 0;
    for (int item : members) count += at(item, test);
    return count;
}

TestMatrix gen_bernoulli_matrix(int n, int t, double p, CounterRng& rng) {
    if (n <= 0 || t < 0) throw std::invalid_argument("gen_bernoulli_matrix: bad dimensions");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("gen_bernoulli_matrix: p must lie strictly in (0, 1)");
    }
    TestMatrix m(n, t);
    for (int test = 0; test < t; ++test) {
        for (int item = 0; item < n; ++item) {
            m.set(item, test, rng.bernoulli(p) ? 1 : 0);
        }
    }
    return m;
}

Strategy Strategy::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);

    Strategy s;
    bool have_p = false, have_s = false;
    while (!params.empty()) {
        const auto comma = params.find(',');
        const std::string item = params.substr(0, comma);
        params = comma == std::string::npos ? "" : params.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("Strategy: expected key=value, got '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "p" && !have_p) {
            have_p = true;
            if (val == "opt") {
                s.p_is_opt = true;
            } else {
                s.p = parse_double_field(val);
            }
        } else if (key == "s" && !have_s) {
            have_s = true;
            s.stage_size = static_cast<int>(parse_double_field(val));
        } else {
            throw std::invalid_argument("Strategy: unknown or repeated parameter '" + key + "'");
        }
    }

    if (name == "bernoulli") {
        if (!have_p || have_s) throw std::invalid_argument("Strategy: bernoulli needs exactly p");
        s.kind = StrategyKind::Bernoulli;
    } else if (name == "binary-split") {
        if (have_p || have_s) throw std::invalid_argument("Strategy: binary-split takes no parameters");
        s.kind = StrategyKind::BinarySplit;
    } else if (name == "staged") {
        if (!have_p || !have_s) throw std::invalid_argument("Strategy: staged needs p and s");
        s.kind = StrategyKind::StagedBernoulli;
    } else {
        throw std::invalid_argument("Strategy: unknown strategy '" + name + "'");
    }
    s.validate();
    return s;
}

void Strategy::validate() const {
    switch (kind) {
        case StrategyKind::Bernoulli:
        case StrategyKind::StagedBernoulli:
            if (!p_is_opt && !(p > 0.0 && p < 1.0)) {
                throw std::invalid_argument("Strategy: p must lie strictly in (0, 1)");
            }
            if (kind == StrategyKind::StagedBernoulli && stage_size < 1) {
                throw std::invalid_argument("Strategy: stage size must be >= 1");
            }
            break;
        case StrategyKind::BinarySplit:
            break;
    }
}

std::string Strategy::spec_string() const {
    const std::string pstr = p_is_opt ? "opt" : format_param(p);
    switch (kind) {
        case StrategyKind::Bernoulli:
            return "bernoulli:p=" + pstr;
        case StrategyKind::BinarySplit:
            return "binary-split";
        case StrategyKind::StagedBernoulli:
            return "staged:p=" + pstr + ",s=" + std::to_string(stage_size);
    }
    return {};
}

StrategySession::StrategySession(const Strategy& strategy, int n_items, int k_defects, int budget,
                                 CounterRng design_rng)
    : strategy_(strategy),
      n_items_(n_items),
      k_defects_(k_defects),
      budget_(budget),
      rng_(design_rng) {
    strategy_.validate();
    if (n_items_ <= 0) throw std::invalid_argument("StrategySession: n_items must be positive");
    if (k_defects_ < 0 || k_defects_ > n_items_) {
        throw std::invalid_argument("StrategySession: bad defect count");
    }
    if (budget_ < 0) throw std::invalid_argument("StrategySession: negative budget");
    if (strategy_.p_is_opt && strategy_.kind != StrategyKind::BinarySplit) {
        throw std::invalid_argument("StrategySession: p=opt must be resolved before running");
    }
    if (strategy_.kind == StrategyKind::BinarySplit) {
        active_.resize(static_cast<std::size_t>(n_items_));
        for (int i = 0; i < n_items_; ++i) active_[static_cast<std::size_t>(i)] = i;
    }
}

void StrategySession::verify_history(std::span<const PoolStep> history) {
    if (history.size() != emitted_.size()) {
        throw std::invalid_argument("StrategySession: history must contain every prior pool with its outcome");
    }
    for (std::size_t i = outcomes_seen_; i < history.size(); ++i) {
        if (history[i].pool != emitted_[i]) {
            throw std::invalid_argument("StrategySession: history pool does not match the emitted pool");
        }
    }
}

std::optional<std::vector<std::uint8_t>> StrategySession::next_pool(
    std::span<const PoolStep> history) {
    verify_history(history);
    if (done_) return std::nullopt;

    std::optional<std::vector<std::uint8_t>> pool;
    switch (strategy_.kind) {
        case StrategyKind::Bernoulli:
        case StrategyKind::StagedBernoulli:
            if (static_cast<int>(emitted_.size()) >= budget_) {
                done_ = true;
                return std::nullopt;
            }
            outcomes_seen_ = history.size();
            pool = next_bernoulli_pool();
            break;
        case StrategyKind::BinarySplit:
            // The last outcome is folded in before the budget gate so that a
            // capped session still ends with everything it was told.
            if (awaiting_outcome_) {
                split_apply_outcome(history[outcomes_seen_].outcome);
                ++outcomes_seen_;
                awaiting_outcome_ = false;
            }
            pool = next_split_pool();
            if (pool && static_cast<int>(emitted_.size()) >= budget_) {
                done_ = true;
                return std::nullopt;
            }
            break;
    }
    if (pool) {
        emitted_.push_back(*pool);
        if (strategy_.kind == StrategyKind::BinarySplit) awaiting_outcome_ = true;
    }
    return pool;
}

std::optional<std::vector<std::uint8_t>> StrategySession::next_bernoulli_pool() {
    if (stage_next_ == stage_queue_.size()) {
        const int stage_cap = strategy_.kind == StrategyKind::Bernoulli
                                  ? budget_
                                  : strategy_.stage_size;
        const int remaining = budget_ - static_cast<int>(emitted_.size());
        const int count = std::min(stage_cap, remaining);
        stage_queue_.clear();
        stage_next_ = 0;
        for (int t = 0; t < count; ++t) {
            std::vector<std::uint8_t> pool(static_cast<std::size_t>(n_items_));
            for (int i = 0; i < n_items_; ++i) {
                pool[static_cast<std::size_t>(i)] = rng_.bernoulli(strategy_.p) ? 1 : 0;
            }
            stage_queue_.push_back(std::move(pool));
        }
    }
    return stage_queue_[stage_next_++];
}

void StrategySession::split_start_round() {
    round_items_ = active_;
    const int m = static_cast<int>(round_items_.size());
    if (m == 0) {
        done_ = true;
        return;
    }
    block_lo_ = 0;
    block_size_ = 1 << ceil_log2(m);
}

std::vector<std::uint8_t> StrategySession::split_block_lower_pool() const {
    std::vector<std::uint8_t> pool(static_cast<std::size_t>(n_items_), 0);
    const int half = block_size_ / 2;
    const int m = static_cast<int>(round_items_.size());
    for (int pos = block_lo_; pos < block_lo_ + half && pos < m; ++pos) {
        pool[static_cast<std::size_t>(round_items_[static_cast<std::size_t>(pos)])] = 1;
    }
    return pool;
}

void StrategySession::split_apply_outcome(int outcome) {
    const int half = block_size_ / 2;
    if (outcome) {
        // At least one defective reported in the lower half; descend into it.
        block_size_ = half;
    } else {
        // Lower half reported clean; its real items are cleared for good.
        const int m = static_cast<int>(round_items_.size());
        for (int pos = block_lo_; pos < block_lo_ + half && pos < m; ++pos) {
            const int item = round_items_[static_cast<std::size_t>(pos)];
            active_.erase(std::find(active_.begin(), active_.end(), item));
            cleared_.push_back(item);
        }
        block_lo_ += half;
        block_size_ = half;
    }
}

std::optional<std::vector<std::uint8_t>> StrategySession::next_split_pool() {
    for (;;) {
        if (static_cast<int>(found_.size()) >= k_defects_) {
            done_ = true;
            return std::nullopt;
        }
        if (block_size_ == 0) {
            split_start_round();
            if (done_) return std::nullopt;
        }
        if (block_size_ == 1) {
            // Block resolved to a single position. Real position: that item is
            // the round's defective. Virtual position (reachable only under
            // noise): the round found nothing.
            if (block_lo_ < static_cast<int>(round_items_.size())) {
                const int item = round_items_[static_cast<std::size_t>(block_lo_)];
                found_.push_back(item);
                active_.erase(std::find(active_.begin(), active_.end(), item));
            }
            block_size_ = 0;
            continue;
        }
        return split_block_lower_pool();
    }
}

std::vector<int> StrategySession::split_estimate() const {
    if (strategy_.kind != StrategyKind::BinarySplit) {
        throw std::logic_error("split_estimate: not a binary-split session");
    }
    std::vector<int> est = found_;
    if (static_cast<int>(est.size()) < k_defects_) {
        std::vector<int> fill = active_;
        std::sort(fill.begin(), fill.end());
        std::vector<int> cleared = cleared_;
        std::sort(cleared.begin(), cleared.end());
        fill.insert(fill.end(), cleared.begin(), cleared.end());
        for (int item : fill) {
            if (static_cast<int>(est.size()) >= k_defects_) break;
            if (std::find(est.begin(), est.end(), item) == est.end()) est.push_back(item);
        }
    }
    std::sort(est.begin(), est.end());
    return est;
}

}  // namespace gtlab
