#include "grfg/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grfg {

Mlp::Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int s : sizes_) {
        if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        weight_offsets_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
        bias_offsets_.push_back(total);
        total += static_cast<std::size_t>(sizes_[l + 1]);
    }
    params_.assign(total, 0.0);

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        double bound = std::sqrt(6.0 / sizes_[l]);
        std::uniform_real_distribution<double> dist(-bound, bound);
        std::size_t w = weight_offsets_[l];
        for (int i = 0; i < sizes_[l + 1] * sizes_[l]; ++i) params_[w + i] = dist(rng);
        // biases start at zero
    }
}

double Mlp::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != sizes_.front()) {
        throw std::invalid_argument("Mlp::forward: input size mismatch");
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        next.assign(out, 0.0);
        const double* W = params_.data() + weight_offsets_[l];
        const double* b = params_.data() + bias_offsets_[l];
        for (int o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
            next[o] = acc;
        }
        const bool last = (l + 2 == sizes_.size());
        if (!last) {
            for (double& v : next) v = std::max(0.0, v);
        }
        cur.swap(next);
    }
    return cur[0];
}

void Mlp::backward(std::span<const double> x, double upstream, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("Mlp::backward: gradient size mismatch");
    }
    const std::size_t L = sizes_.size() - 1;

    // forward pass, keeping pre-activation signs and post-activation values
    std::vector<std::vector<double>> acts(L + 1);
    acts[0].assign(x.begin(), x.end());
    std::vector<std::vector<double>> pre(L);
    for (std::size_t l = 0; l < L; ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        pre[l].assign(out, 0.0);
        const double* W = params_.data() + weight_offsets_[l];
        const double* b = params_.data() + bias_offsets_[l];
        for (int o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * acts[l][i];
            pre[l][o] = acc;
        }
        acts[l + 1] = pre[l];
        if (l + 1 < L) {
            for (double& v : acts[l + 1]) v = std::max(0.0, v);
        }
    }

    // backward pass
    std::vector<double> delta{upstream};  // d(loss)/d(output), output is scalar
    for (std::size_t l = L; l-- > 0;) {
        const int in = sizes_[l], out = sizes_[l + 1];
        double* gW = grad.data() + weight_offsets_[l];
        double* gb = grad.data() + bias_offsets_[l];
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            gb[o] += d;
            double* row = gW + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) row[i] += d * acts[l][i];
        }
        if (l == 0) break;
        std::vector<double> prev(in, 0.0);
        const double* W = params_.data() + weight_offsets_[l];
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) prev[i] += d * row[i];
        }
        // ReLU gate of layer l's activation
        for (int i = 0; i < in; ++i) {
            if (pre[l - 1][i] <= 0.0) prev[i] = 0.0;
        }
        delta.swap(prev);
    }
}

void AdamState::step(std::vector<double>& params, const std::vector<double>& grad) {
    if (m.size() != params.size()) {
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
    }
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

std::size_t select_action(const QScorer& q, std::span<const double> state,
                          const std::vector<std::vector<double>>& candidates, double eps,
                          Rng& rng) {
    if (candidates.empty()) throw std::invalid_argument("select_action: empty candidate set");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return pick(rng);
    }
    std::size_t best = 0;
    double best_q = q.score(state, candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double v = q.score(state, candidates[i]);
        if (v > best_q) {
            best_q = v;
            best = i;
        }
    }
    return best;
}

void ReplayBuffer::push(Transition t) {
    if (buf_.size() == capacity_) buf_.pop_front();
    buf_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    std::size_t k = std::min(batch, buf_.size());
    std::vector<std::size_t> idx(buf_.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<const Transition*> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(&buf_[idx[i]]);
    return out;
}

double ExplorationSchedule::at(std::size_t step, std::size_t total_steps) const {
    double lo = std::min(eps_start, eps_end);
    double hi = std::max(eps_start, eps_end);
    double span = decay_fraction * static_cast<double>(total_steps);
    double progress = span > 0.0 ? static_cast<double>(step) / span : 1.0;
    double eps = eps_start + (eps_end - eps_start) * std::min(1.0, progress);
    return std::clamp(eps, lo, hi);
}

DqnAgent::DqnAgent(int state_dim, int action_dim, const AgentConfig& cfg, std::uint64_t seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      cfg_(cfg),
      online_({state_dim + action_dim, cfg.hidden_units, cfg.hidden_units, 1}, seed),
      replay_(cfg.replay_capacity) {
    opt_.lr = cfg.learning_rate;
    if (cfg_.target_network) target_ = online_;
}

double DqnAgent::score(std::span<const double> state, std::span<const double> action) const {
    scratch_.assign(state.begin(), state.end());
    scratch_.insert(scratch_.end(), action.begin(), action.end());
    return online_.forward(scratch_);
}

double DqnAgent::target_q(std::span<const double> state, std::span<const double> action) const {
    scratch_.assign(state.begin(), state.end());
    scratch_.insert(scratch_.end(), action.begin(), action.end());
    return target_ ? target_->forward(scratch_) : online_.forward(scratch_);
}

double DqnAgent::td_update(const std::vector<const Transition*>& batch, double gamma) {
    if (batch.empty()) throw std::invalid_argument("td_update: empty batch");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("td_update: gamma outside [0,1]");

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> grad(online_.n_params(), 0.0);
    std::vector<double> input;
    double loss = 0.0;
    for (const Transition* tr : batch) {
        // bootstrap target, no gradient through it
        double target = tr->reward;
        if (gamma > 0.0 && !tr->next_candidates.empty()) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& cand : tr->next_candidates) {
                best = std::max(best, target_q(tr->next_state, cand));
            }
            target += gamma * best;
        }
        input.assign(tr->state.begin(), tr->state.end());
        input.insert(input.end(), tr->action.begin(), tr->action.end());
        double q = online_.forward(input);
        double err = q - target;
        loss += err * err * inv_b;
        online_.backward(input, 2.0 * err * inv_b, grad);
    }
    opt_.step(online_.params(), grad);
    ++step_count_;
    if (target_ && cfg_.target_sync_every > 0 && step_count_ % cfg_.target_sync_every == 0) {
        target_ = online_;
    }
    return loss;
}

std::optional<double> DqnAgent::train_step(double gamma, Rng& rng) {
    if (replay_.size() == 0) return std::nullopt;
    auto batch = replay_.sample(cfg_.batch_size, rng);
    return td_update(batch, gamma);
}

}  // namespace grfg
