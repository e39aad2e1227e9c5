#include "railq/solvers.hpp"

#include "railq/errors.hpp"
#include "railq/validate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <thread>

namespace railq {

unsigned default_thread_count() {
    if (const char* env = std::getenv("RAILQ_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

unsigned resolve_threads(unsigned requested) {
    return requested == 0 ? default_thread_count() : requested;
}

/// Q scaled by the lcm of its denominators; a_ij = 2 Q_ij so that
/// scale · xᵀQx = Σ diag_i x_i + Σ_{i<j} a_ij x_i x_j.
struct IntegerForm {
    std::size_t n = 0;
    std::int64_t scale = 1;
    std::vector<std::int64_t> diag;
    std::vector<std::vector<std::int64_t>> a;

    explicit IntegerForm(const QuboMatrix& Q) : n(Q.size()), diag(n), a(n, std::vector<std::int64_t>(n, 0)) {
        for (std::size_t i = 0; i < n; ++i) scale = std::lcm(scale, Q.diagonal(i).denominator());
        for (const auto& [key, value] : Q.couplings()) scale = std::lcm(scale, (2 * value).denominator());
        for (std::size_t i = 0; i < n; ++i) diag[i] = integral(Q.diagonal(i));
        for (const auto& [key, value] : Q.couplings()) {
            const auto v = integral(2 * value);
            a[key.first][key.second] = v;
            a[key.second][key.first] = v;
        }
    }

    [[nodiscard]] std::int64_t integral(const Rational& r) const {
        const Rational scaled = r * scale;
        return scaled.numerator();
    }

    [[nodiscard]] Rational exact(std::int64_t e) const { return Rational(e, scale); }

    [[nodiscard]] std::int64_t energy(std::uint64_t x) const {
        std::int64_t e = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!((x >> i) & 1U)) continue;
            e += diag[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                if ((x >> j) & 1U) e += a[i][j];
            }
        }
        return e;
    }
};

/// Keeps the k lowest distinct energies with every state seen at them.
class LevelKeeper {
public:
    explicit LevelKeeper(std::size_t k) : k_(k) {}

    [[nodiscard]] bool full() const { return levels_.size() >= k_; }
    [[nodiscard]] std::int64_t threshold() const {
        return full() ? levels_.rbegin()->first : std::numeric_limits<std::int64_t>::max();
    }

    void offer(std::int64_t e, std::uint64_t x) {
        if (full() && e > levels_.rbegin()->first) return;
        levels_[e].push_back(x);
        if (levels_.size() > k_) levels_.erase(std::prev(levels_.end()));
    }

    void merge(const LevelKeeper& other) {
        for (const auto& [e, states] : other.levels_) {
            for (auto x : states) offer(e, x);
        }
    }

    [[nodiscard]] const std::map<std::int64_t, std::vector<std::uint64_t>>& levels() const { return levels_; }

private:
    std::size_t k_;
    std::map<std::int64_t, std::vector<std::uint64_t>> levels_;
};

Bits unpack(std::uint64_t x, std::size_t n) {
    Bits bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((x >> i) & 1U);
    return bits;
}

std::vector<SpectrumEntry> to_spectrum(const IntegerForm& form,
                                       const std::map<std::int64_t, std::vector<std::uint64_t>>& levels) {
    std::vector<SpectrumEntry> out;
    for (const auto& [e, states] : levels) {
        SpectrumEntry entry{form.exact(e), {}};
        for (auto x : states) entry.states.push_back(unpack(x, form.n));
        std::sort(entry.states.begin(), entry.states.end());
        entry.states.erase(std::unique(entry.states.begin(), entry.states.end()), entry.states.end());
        out.push_back(std::move(entry));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gray-code enumeration
// ---------------------------------------------------------------------------

void gray_chunk(const IntegerForm& f, std::uint64_t prefix, std::size_t low_bits, LevelKeeper& keep) {
    std::uint64_t x = prefix;
    std::int64_t e = f.energy(x);
    std::vector<std::int64_t> field(f.n, 0);
    for (std::size_t i = 0; i < f.n; ++i) {
        for (std::size_t j = 0; j < f.n; ++j) {
            if ((x >> j) & 1U) field[i] += f.a[i][j];
        }
    }
    keep.offer(e, x);
    const std::uint64_t count = std::uint64_t{1} << low_bits;
    for (std::uint64_t step = 1; step < count; ++step) {
        const auto b = static_cast<std::size_t>(std::countr_zero(step));
        const bool was_set = (x >> b) & 1U;
        const std::int64_t flip = f.diag[b] + field[b];
        e += was_set ? -flip : flip;
        x ^= std::uint64_t{1} << b;
        const auto& column = f.a[b];
        if (was_set) {
            for (std::size_t i = 0; i < f.n; ++i) field[i] -= column[i];
        } else {
            for (std::size_t i = 0; i < f.n; ++i) field[i] += column[i];
        }
        if (e <= keep.threshold()) keep.offer(e, x);
    }
}

std::map<std::int64_t, std::vector<std::uint64_t>> gray_code_levels(const IntegerForm& f, std::size_t k,
                                                                    unsigned threads) {
    std::size_t split_bits = 0;
    if (threads > 1) {
        while ((std::size_t{1} << split_bits) < static_cast<std::size_t>(threads) * 4 && split_bits + 1 < f.n) {
            ++split_bits;
        }
    }
    const std::size_t chunks = std::size_t{1} << split_bits;
    const std::size_t low_bits = f.n - split_bits;
    std::vector<LevelKeeper> keepers(chunks, LevelKeeper(k));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            gray_chunk(f, static_cast<std::uint64_t>(c) << low_bits, low_bits, keepers[c]);
        }
    };
    if (chunks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    LevelKeeper merged(k);
    for (const auto& keep : keepers) merged.merge(keep);
    return merged.levels();
}

// ---------------------------------------------------------------------------
// Branch and bound over columns in group order
// ---------------------------------------------------------------------------

struct Range {
    std::size_t first;
    std::size_t end;
};

class BranchAndBound {
public:
    BranchAndBound(const IntegerForm& f, std::vector<Range> groups) : f_(f), groups_(std::move(groups)) {
        const auto n = f_.n;
        group_of_.assign(n, 0);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            for (auto i = groups_[g].first; i < groups_[g].end; ++i) group_of_[i] = g;
        }
        min_inner_.assign(groups_.size(), 0);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            bool any = false;
            for (auto i = groups_[g].first; i < groups_[g].end; ++i) {
                for (auto j = i + 1; j < groups_[g].end; ++j) {
                    min_inner_[g] = any ? std::min(min_inner_[g], f_.a[i][j]) : f_.a[i][j];
                    any = true;
                }
            }
        }
        negative_cross_.assign(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) {
            std::int64_t row = 0;
            for (auto j = i + 1; j < n; ++j) {
                if (group_of_[i] != group_of_[j]) row += std::min<std::int64_t>(0, f_.a[i][j]);
            }
            negative_cross_[i] = negative_cross_[i + 1] + row;
        }
        later_.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            for (auto u = t + 1; u < n; ++u) {
                if (f_.a[t][u] != 0) later_[t].emplace_back(u, f_.a[t][u]);
            }
        }
        scratch_.reserve(n);
    }

    std::map<std::int64_t, std::vector<std::uint64_t>> lowest_levels(std::size_t k) {
        LevelKeeper keep(k);
        run([&](std::int64_t e, std::uint64_t x) { keep.offer(e, x); }, [&] { return keep.threshold(); }, false);
        return keep.levels();
    }

    std::map<std::int64_t, std::vector<std::uint64_t>> below(std::int64_t limit) {
        std::map<std::int64_t, std::vector<std::uint64_t>> out;
        run([&](std::int64_t e, std::uint64_t x) { if (e < limit) out[e].push_back(x); }, [&] { return limit; },
            true);
        return out;
    }

private:
    template <class Offer, class Threshold>
    void run(Offer offer, Threshold threshold, bool strict) {
        e_ = f_.diag;
        energy_ = 0;
        x_ = 0;
        dfs(0, offer, threshold, strict);
    }

    [[nodiscard]] std::int64_t bound(std::size_t t) {
        std::int64_t lb = negative_cross_[t];
        for (std::size_t g = t >= f_.n ? groups_.size() : group_of_[t]; g < groups_.size(); ++g) {
            const auto start = std::max(groups_[g].first, t);
            scratch_.assign(e_.begin() + static_cast<std::ptrdiff_t>(start),
                            e_.begin() + static_cast<std::ptrdiff_t>(groups_[g].end));
            std::sort(scratch_.begin(), scratch_.end());
            std::int64_t best = 0;
            std::int64_t prefix = 0;
            for (std::size_t m = 1; m <= scratch_.size(); ++m) {
                prefix += scratch_[m - 1];
                const auto pairs = static_cast<std::int64_t>(m * (m - 1) / 2);
                best = std::min(best, prefix + pairs * min_inner_[g]);
                if (scratch_[m - 1] >= 0 && min_inner_[g] >= 0) break;
            }
            lb += best;
        }
        return lb;
    }

    template <class Offer, class Threshold>
    void dfs(std::size_t t, Offer& offer, Threshold& threshold, bool strict) {
        if (t == f_.n) {
            offer(energy_, x_);
            return;
        }
        const bool one_first = e_[t] < 0;
        for (int pass = 0; pass < 2; ++pass) {
            const bool set = (pass == 0) == one_first;
            if (set) {
                energy_ += e_[t];
                x_ |= std::uint64_t{1} << t;
                for (const auto& [u, v] : later_[t]) e_[u] += v;
            }
            const auto lb = energy_ + bound(t + 1);
            const auto limit = threshold();
            if (strict ? lb < limit : lb <= limit) dfs(t + 1, offer, threshold, strict);
            if (set) {
                energy_ -= e_[t];
                x_ &= ~(std::uint64_t{1} << t);
                for (const auto& [u, v] : later_[t]) e_[u] -= v;
            }
        }
    }

    const IntegerForm& f_;
    std::vector<Range> groups_;
    std::vector<std::size_t> group_of_;
    std::vector<std::int64_t> min_inner_;
    std::vector<std::int64_t> negative_cross_;
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> later_;
    std::vector<std::int64_t> e_;
    std::vector<std::int64_t> scratch_;
    std::int64_t energy_ = 0;
    std::uint64_t x_ = 0;
};

std::vector<Range> problem_groups(const QuboProblem& problem) {
    std::vector<Range> groups;
    for (const auto& g : problem.index.groups()) groups.push_back({g.first, g.first + g.size});
    return groups;
}

std::vector<Range> singleton_groups(std::size_t n) {
    std::vector<Range> groups;
    for (std::size_t i = 0; i < n; ++i) groups.push_back({i, i + 1});
    return groups;
}

void check_size(std::size_t n, const SpectrumOptions& options) {
    const std::size_t limit = std::min<std::size_t>(options.max_vars, 64);
    if (n > limit) {
        throw CapacityError("exact enumeration supports at most " + std::to_string(limit) + " variables, problem has " +
                            std::to_string(n) + "; use simulated_annealing instead");
    }
    if (options.k_levels == 0) throw ParameterError("k_levels must be >= 1");
}

std::vector<SpectrumEntry> spectrum_impl(const QuboMatrix& Q, std::vector<Range> groups,
                                         const SpectrumOptions& options) {
    check_size(Q.size(), options);
    const IntegerForm form(Q);
    if (form.n == 0) return {SpectrumEntry{0, {Bits{}}}};
    bool gray = false;
    switch (options.method) {
    case SpectrumMethod::gray_code: gray = true; break;
    case SpectrumMethod::branch_and_bound: gray = false; break;
    case SpectrumMethod::automatic: gray = form.n <= options.gray_code_max_vars; break;
    }
    if (gray) {
        if (form.n > 40) throw CapacityError("Gray-code enumeration is limited to 40 variables");
        return to_spectrum(form, gray_code_levels(form, options.k_levels, resolve_threads(options.threads)));
    }
    BranchAndBound search(form, std::move(groups));
    return to_spectrum(form, search.lowest_levels(options.k_levels));
}

} // namespace

std::vector<SpectrumEntry> brute_force_spectrum(const QuboProblem& problem, const SpectrumOptions& options) {
    return spectrum_impl(problem.Q, problem_groups(problem), options);
}

std::vector<SpectrumEntry> brute_force_spectrum(const QuboMatrix& Q, const SpectrumOptions& options) {
    return spectrum_impl(Q, singleton_groups(Q.size()), options);
}

std::vector<SpectrumEntry> enumerate_below(const QuboProblem& problem, const Rational& threshold,
                                           const SpectrumOptions& options) {
    check_size(problem.size(), options);
    const IntegerForm form(problem.Q);
    // scaled energies are integers, so E < T  <=>  scaled E < ceil(scaled T)
    const Rational scaled = threshold * form.scale;
    auto limit = scaled.numerator() / scaled.denominator();
    if (scaled.numerator() > 0 && scaled.numerator() % scaled.denominator() != 0) ++limit;
    BranchAndBound search(form, problem_groups(problem));
    return to_spectrum(form, search.below(limit));
}

// ---------------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------------

std::size_t SampleSet::total() const {
    std::size_t sum = 0;
    for (const auto& r : reads) sum += r.multiplicity;
    return sum;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SparseForm {
    std::vector<double> diag;
    std::vector<std::size_t> start;
    std::vector<std::size_t> column;
    std::vector<double> weight;   ///< 2 Q_ij
};

SparseForm sparse_form(const QuboMatrix& Q) {
    const auto n = Q.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (const auto& [key, value] : Q.couplings()) {
        const double w = to_double(2 * value);
        rows[key.first].emplace_back(key.second, w);
        rows[key.second].emplace_back(key.first, w);
    }
    SparseForm s;
    s.diag.resize(n);
    s.start.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        s.diag[i] = to_double(Q.diagonal(i));
        for (const auto& [j, w] : rows[i]) {
            s.column.push_back(j);
            s.weight.push_back(w);
        }
        s.start.push_back(s.column.size());
    }
    return s;
}

Bits anneal_once(const SparseForm& s, const std::vector<double>& betas, std::uint64_t seed) {
    const auto n = s.diag.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Bits x(n);
    for (auto& bit : x) bit = static_cast<std::uint8_t>(rng() & 1U);
    std::vector<double> field(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        for (auto p = s.start[i]; p < s.start[i + 1]; ++p) field[s.column[p]] += s.weight[p];
    }
    for (double beta : betas) {
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = (x[i] ? -1.0 : 1.0) * (s.diag[i] + field[i]);
            if (delta > 0 && uniform(rng) >= std::exp(-beta * delta)) continue;
            const double sign = x[i] ? -1.0 : 1.0;
            x[i] ^= 1U;
            for (auto p = s.start[i]; p < s.start[i + 1]; ++p) field[s.column[p]] += sign * s.weight[p];
        }
    }
    return x;
}

} // namespace

SampleSet simulated_annealing(const QuboMatrix& Q, const AnnealParams& params) {
    if (params.num_reads < 1) throw ParameterError("num_reads must be >= 1");
    if (params.sweeps < 1) throw ParameterError("sweeps must be >= 1");
    if (!(params.beta_min > 0)) throw ParameterError("beta_min must be positive");
    if (!(params.beta_min < params.beta_max)) throw ParameterError("beta range is degenerate (beta_min >= beta_max)");

    const auto s = sparse_form(Q);
    std::vector<double> betas(params.sweeps);
    for (std::size_t k = 0; k < params.sweeps; ++k) {
        const double frac = params.sweeps == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(params.sweeps - 1);
        betas[k] = params.beta_min * std::pow(params.beta_max / params.beta_min, frac);
    }

    std::vector<Bits> states(params.num_reads);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < params.num_reads; r = next++) {
            states[r] = anneal_once(s, betas, splitmix64(params.seed ^ splitmix64(r)));
        }
    };
    const unsigned threads = std::min<std::size_t>(resolve_threads(params.threads), params.num_reads);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::map<Bits, std::size_t> counts;
    for (auto& x : states) ++counts[x];
    SampleSet out;
    out.params = params;
    for (auto& [x, count] : counts) out.reads.push_back({x, Q.energy(x), count});
    std::stable_sort(out.reads.begin(), out.reads.end(),
                     [](const SampleRead& a, const SampleRead& b) { return a.energy < b.energy; });
    return out;
}

std::optional<FeasibleSample> best_feasible(const SampleSet& samples, const QuboProblem& problem,
                                            const RailwayInstance& instance) {
    std::optional<FeasibleSample> best;
    for (const auto& read : samples.reads) {
        if (best && best->energy <= read.energy) break;
        const auto decoded = decode(problem, read.state);
        if (!decoded.ok()) continue;
        if (!check_feasibility(instance, *decoded.schedule).feasible()) continue;
        best = FeasibleSample{read.state, read.energy, *decoded.schedule};
    }
    return best;
}

std::string bit_string(const Bits& x) {
    std::string s(x.size(), '0');
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i]) s[i] = '1';
    }
    return s;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& spectrum, const QuboProblem& problem,
                        const RailwayInstance& instance) {
    out << "energy,degeneracy,state,feasible\n";
    for (const auto& entry : spectrum) {
        for (const auto& x : entry.states) {
            out << format_rational(entry.energy) << ',' << entry.degeneracy() << ',' << bit_string(x) << ','
                << (check_state(instance, problem, x).feasible() ? 1 : 0) << '\n';
        }
    }
}

void write_samples_csv(std::ostream& out, const SampleSet& samples, const QuboProblem& problem,
                       const RailwayInstance& instance) {
    out << "energy,multiplicity,state,feasible\n";
    for (const auto& read : samples.reads) {
        out << format_rational(read.energy) << ',' << read.multiplicity << ',' << bit_string(read.state) << ','
            << (check_state(instance, problem, read.state).feasible() ? 1 : 0) << '\n';
    }
}

} // namespace railq
