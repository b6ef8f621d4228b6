#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "grfg/rng.hpp"

namespace grfg {

// Fully-connected scorer: ReLU hidden layers, linear scalar output. Parameters
// live in one flat vector so the optimizer, checkpoints, and finite-difference
// checks all see the same layout.
class Mlp {
public:
    Mlp(std::vector<int> layer_sizes, std::uint64_t seed);

    double forward(std::span<const double> x) const;
    // Accumulates d(upstream * output)/d(params) into grad (same layout as
    // params()).
    void backward(std::span<const double> x, double upstream, std::vector<double>& grad) const;

    const std::vector<int>& layer_sizes() const { return sizes_; }
    std::size_t n_params() const { return params_.size(); }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& params() { return params_; }

private:
    std::vector<int> sizes_;
    std::vector<double> params_;              // W0,b0,W1,b1,... row-major
    std::vector<std::size_t> weight_offsets_; // per layer
    std::vector<std::size_t> bias_offsets_;
};

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    std::vector<double> m, v;

    void step(std::vector<double>& params, const std::vector<double>& grad);
};

// Q scorer interface; tests stub this to pin argmax behaviour.
class QScorer {
public:
    virtual ~QScorer() = default;
    virtual double score(std::span<const double> state, std::span<const double> action) const = 0;
};

// Epsilon-greedy choice over a variable candidate set: with probability eps a
// uniform candidate, otherwise the Q-argmax (ties -> lowest index).
std::size_t select_action(const QScorer& q, std::span<const double> state,
                          const std::vector<std::vector<double>>& candidates, double eps, Rng& rng);

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    std::vector<std::vector<double>> next_candidates;  // empty -> target is just the reward
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition t);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    // Uniform sample without replacement within the batch.
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::deque<Transition> buf_;
};

struct ExplorationSchedule {
    double eps_start = 0.9;
    double eps_end = 0.1;
    double decay_fraction = 0.6;  // fraction of total steps spent decaying

    double at(std::size_t step, std::size_t total_steps) const;
};

struct AgentConfig {
    double learning_rate = 1e-3;
    int hidden_units = 64;  // two hidden layers of this width
    std::size_t replay_capacity = 2048;
    std::size_t batch_size = 32;
    bool target_network = false;
    int target_sync_every = 10;
};

// One DQN-style agent scoring (state ++ action-representation) pairs.
class DqnAgent : public QScorer {
public:
    DqnAgent(int state_dim, int action_dim, const AgentConfig& cfg, std::uint64_t seed);

    double score(std::span<const double> state, std::span<const double> action) const override;

    std::size_t select(std::span<const double> state,
                       const std::vector<std::vector<double>>& candidates, double eps,
                       Rng& rng) const {
        return select_action(*this, state, candidates, eps, rng);
    }

    void remember(Transition t) { replay_.push(std::move(t)); }
    std::size_t replay_size() const { return replay_.size(); }

    // One gradient step on the squared TD error of the batch; the bootstrap
    // target (reward + gamma * max next Q) is held fixed. Returns the
    // pre-step loss.
    double td_update(const std::vector<const Transition*>& batch, double gamma);
    // Samples a minibatch from replay and applies td_update; nullopt while
    // the replay buffer is empty.
    std::optional<double> train_step(double gamma, Rng& rng);

    const Mlp& net() const { return online_; }
    Mlp& net() { return online_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }

private:
    double target_q(std::span<const double> state, std::span<const double> action) const;

    int state_dim_, action_dim_;
    AgentConfig cfg_;
    Mlp online_;
    std::optional<Mlp> target_;
    AdamState opt_;
    ReplayBuffer replay_;
    long step_count_ = 0;
    mutable std::vector<double> scratch_;
};

}  // namespace grfg
