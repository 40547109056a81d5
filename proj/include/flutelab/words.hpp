#pragma once

// Reduced words over an indexed family of group generators, plus
// deterministic enumeration of word balls.  Enumeration order is fixed
// (depth-first, letters ordered g1, g1^-1, g2, g2^-1, ...) so scans and
// minimizations are reproducible; the optional parallel map partitions by
// first letter and reassembles in that same order.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "flutelab/errors.hpp"
#include "flutelab/moebius.hpp"

namespace flutelab {

struct Letter {
    std::size_t generator;  // index into the generator list
    int exponent;           // nonzero once stored in a Word
};

// A reduced word: adjacent letters use distinct generators; same-generator
// runs are merged on construction and cancelling runs collapse away.
class Word {
  public:
    Word() = default;

    explicit Word(const std::vector<Letter>& raw) {
        for (const Letter& l : raw) push(l);
    }

    void push(const Letter& l) {
        if (l.exponent == 0) return;
        if (!letters_.empty() && letters_.back().generator == l.generator) {
            letters_.back().exponent += l.exponent;
            if (letters_.back().exponent == 0) letters_.pop_back();
            return;
        }
        letters_.push_back(l);
    }

    const std::vector<Letter>& letters() const { return letters_; }
    bool is_identity() const { return letters_.empty(); }

    int length() const {
        int n = 0;
        for (const Letter& l : letters_) n += std::abs(l.exponent);
        return n;
    }

    std::string to_string() const {
        if (letters_.empty()) return "e";
        std::string out;
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (i) out += "·";
            out += "g" + std::to_string(letters_[i].generator + 1);
            if (letters_[i].exponent != 1)
                out += "^" + std::to_string(letters_[i].exponent);
        }
        return out;
    }

  private:
    std::vector<Letter> letters_;
};

inline MoebiusTransform word_transform(
    const Word& w, const std::vector<MoebiusTransform>& gens) {
    MoebiusTransform m = MoebiusTransform::identity();
    for (const Letter& l : w.letters()) {
        if (l.generator >= gens.size())
            throw DegenerateInput("word letter out of generator range");
        const MoebiusTransform step =
            l.exponent > 0 ? gens[l.generator] : invert(gens[l.generator]);
        for (int k = std::abs(l.exponent); k > 0; --k) m = compose(m, step);
    }
    return m;
}

// Number of nonempty reduced words of length <= radius over n free
// generators: sum_k 2n (2n-1)^(k-1).
inline std::uint64_t reduced_word_count(std::size_t genCount, int radius) {
    if (genCount == 0 || radius <= 0) return 0;
    std::uint64_t total = 0, level = 2 * genCount;
    for (int k = 1; k <= radius; ++k) {
        total += level;
        level *= 2 * genCount - 1;
    }
    return total;
}

inline int thread_count() {
    if (const char* env = std::getenv("FLUTELAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

namespace detail {

// Visit every nonempty reduced word with a fixed first single-letter step.
// `steps` carries the +-1 letters of the current word; `fn` sees the merged
// Word plus the composed transform.
template <typename Fn>
void visit_subtree(const std::vector<MoebiusTransform>& gens,
                   const std::vector<MoebiusTransform>& inverses, int radius,
                   std::size_t firstStep, std::vector<Letter>& steps,
                   Fn&& fn) {
    const std::size_t gi = firstStep / 2;
    const bool pos = (firstStep % 2 == 0);
    const std::size_t n = gens.size();

    struct Frame {
        MoebiusTransform m;
        std::size_t step;
        std::size_t next;  // next candidate step to try as a child
    };
    std::vector<Frame> stack;
    stack.push_back({MoebiusTransform::identity(), 0, 0});  // sentinel root

    MoebiusTransform first =
        compose(stack[0].m, pos ? gens[gi] : inverses[gi]);
    steps.push_back({gi, pos ? 1 : -1});
    fn(Word(steps), first);
    stack.push_back({first, firstStep, 0});

    while (stack.size() > 1) {
        Frame& top = stack.back();
        if (int(stack.size()) - 1 >= radius || top.next >= 2 * n) {
            steps.pop_back();
            stack.pop_back();
            continue;
        }
        const std::size_t t = top.next++;
        // Skip the step that cancels the previous one.
        if (t / 2 == top.step / 2 && (t % 2) != (top.step % 2)) continue;
        const std::size_t g2 = t / 2;
        const bool p2 = (t % 2 == 0);
        MoebiusTransform m2 = compose(top.m, p2 ? gens[g2] : inverses[g2]);
        steps.push_back({g2, p2 ? 1 : -1});
        fn(Word(steps), m2);
        stack.push_back({m2, t, 0});
    }
}

}  // namespace detail

// Deterministic depth-first visit of all nonempty reduced words of length
// <= radius; each word is visited exactly once, before its extensions.
template <typename Fn>
void visit_reduced_words(const std::vector<MoebiusTransform>& gens, int radius,
                         Fn&& fn) {
    if (radius < 0) throw DegenerateInput("word radius must be >= 0");
    if (gens.empty() || radius == 0) return;
    std::vector<MoebiusTransform> inverses;
    inverses.reserve(gens.size());
    for (const MoebiusTransform& g : gens) inverses.push_back(invert(g));
    std::vector<Letter> steps;
    for (std::size_t t = 0; t < 2 * gens.size(); ++t)
        detail::visit_subtree(gens, inverses, radius, t, steps, fn);
}

// Map every reduced word (length 1..radius) through `fn` and return the
// results in the deterministic enumeration order.  Parallelises over
// first-letter subtrees when FLUTELAB_THREADS > 1; the output is identical
// to the sequential order regardless of partitioning.
template <typename R, typename Fn>
std::vector<R> map_reduced_words(const std::vector<MoebiusTransform>& gens,
                                 int radius, Fn&& fn) {
    if (radius < 0) throw DegenerateInput("word radius must be >= 0");
    std::vector<R> out;
    if (gens.empty() || radius == 0) return out;
    std::vector<MoebiusTransform> inverses;
    inverses.reserve(gens.size());
    for (const MoebiusTransform& g : gens) inverses.push_back(invert(g));

    const std::size_t subtrees = 2 * gens.size();
    std::vector<std::vector<R>> parts(subtrees);
    const int workers = std::min<int>(thread_count(), int(subtrees));
    if (workers <= 1) {
        std::vector<Letter> steps;
        for (std::size_t t = 0; t < subtrees; ++t)
            detail::visit_subtree(
                gens, inverses, radius, t, steps,
                [&](const Word& w, const MoebiusTransform& m) {
                    parts[t].push_back(fn(w, m));
                });
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                std::vector<Letter> steps;
                for (std::size_t t = std::size_t(w); t < subtrees;
                     t += std::size_t(workers))
                    detail::visit_subtree(
                        gens, inverses, radius, t, steps,
                        [&](const Word& word, const MoebiusTransform& m) {
                            parts[t].push_back(fn(word, m));
                        });
            });
        }
        for (std::thread& th : pool) th.join();
    }
    std::size_t total = 0;
    for (const std::vector<R>& p : parts) total += p.size();
    out.reserve(total);
    for (std::vector<R>& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace flutelab
