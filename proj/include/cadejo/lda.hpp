#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cadejo/errors.hpp"
#include "cadejo/textproc.hpp"

namespace cadejo {

struct lda_config {
    std::size_t topics = 20;      // K
    double alpha = 0.0;           // document-topic prior; 0 means 50/K
    double beta = 0.01;           // topic-word prior
    std::size_t sweeps = 500;
    std::size_t burn_in = 300;    // convergence logging only
    std::uint64_t seed = 1;

    double effective_alpha() const {
        return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(topics);
    }
};

// Collapsed Gibbs sampler bookkeeping. All counts are derivable from the
// assignment vector z; they are carried to make sweeps O(tokens).
struct gibbs_state {
    std::size_t n_topics = 0;
    std::size_t n_terms = 0;                       // V
    std::vector<std::vector<int>> z;               // per doc, per position
    std::vector<std::vector<int>> doc_topic;       // D x K
    std::vector<std::vector<int>> topic_term;      // K x V
    std::vector<long> topic_total;                 // K
    std::vector<long> doc_total;                   // D
    std::mt19937_64 rng;

    // uniform double in [0, 1): top 53 bits of the generator output
    double next_unit() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
};

struct topic_model {
    std::vector<std::vector<double>> phi;    // K x V, rows sum to 1
    std::vector<std::vector<double>> theta;  // D x K, rows sum to 1
};

// documents are lists of vocabulary positions
using term_docs = std::vector<std::vector<std::size_t>>;

inline gibbs_state init_state(const term_docs& docs, std::size_t n_terms,
                              const lda_config& config) {
    std::size_t total = 0;
    for (const auto& d : docs) total += d.size();
    if (docs.empty() || total == 0 || n_terms == 0)
        throw empty_corpus_error("no tokens to train on");

    gibbs_state st;
    st.n_topics = config.topics;
    st.n_terms = n_terms;
    st.rng.seed(config.seed);
    const std::size_t k = config.topics;
    st.doc_topic.assign(docs.size(), std::vector<int>(k, 0));
    st.topic_term.assign(k, std::vector<int>(n_terms, 0));
    st.topic_total.assign(k, 0);
    st.doc_total.assign(docs.size(), 0);
    st.z.resize(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        st.z[d].resize(docs[d].size());
        for (std::size_t pos = 0; pos < docs[d].size(); ++pos) {
            auto topic = static_cast<std::size_t>(st.next_unit() *
                                                  static_cast<double>(k));
            if (topic >= k) topic = k - 1;
            std::size_t term = docs[d][pos];
            st.z[d][pos] = static_cast<int>(topic);
            ++st.doc_topic[d][topic];
            ++st.topic_term[topic][term];
            ++st.topic_total[topic];
            ++st.doc_total[d];
        }
    }
    return st;
}

// One full pass over all tokens in (document, position) order, resampling
// each assignment from its collapsed conditional
//   p(z = k | rest) ∝ (n_dk + α) (n_kw + β) / (n_k + Vβ)
// with the token's own count removed first.
inline void gibbs_sweep(gibbs_state& st, const term_docs& docs,
                        const lda_config& config) {
    const std::size_t k = st.n_topics;
    const double alpha = config.effective_alpha();
    const double beta = config.beta;
    const double vbeta = static_cast<double>(st.n_terms) * beta;
    std::vector<double> weight(k);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t pos = 0; pos < docs[d].size(); ++pos) {
            const std::size_t term = docs[d][pos];
            const auto old_topic = static_cast<std::size_t>(st.z[d][pos]);
            --st.doc_topic[d][old_topic];
            --st.topic_term[old_topic][term];
            --st.topic_total[old_topic];

            double total = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                double w = (st.doc_topic[d][t] + alpha) *
                           (st.topic_term[t][term] + beta) /
                           (static_cast<double>(st.topic_total[t]) + vbeta);
                weight[t] = w;
                total += w;
            }
            double u = st.next_unit() * total;
            std::size_t chosen = k - 1;
            double cum = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                cum += weight[t];
                if (u < cum) {
                    chosen = t;
                    break;
                }
            }
            st.z[d][pos] = static_cast<int>(chosen);
            ++st.doc_topic[d][chosen];
            ++st.topic_term[chosen][term];
            ++st.topic_total[chosen];
        }
    }
}

// Point estimate from the current counts:
//   phi[k][w]   = (n_kw + β) / (n_k + Vβ)
//   theta[d][k] = (n_dk + α) / (n_d + Kα)
inline topic_model estimate_model(const gibbs_state& st, const lda_config& config) {
    const std::size_t k = st.n_topics;
    const double alpha = config.effective_alpha();
    const double beta = config.beta;
    const double vbeta = static_cast<double>(st.n_terms) * beta;
    const double kalpha = static_cast<double>(k) * alpha;
    topic_model m;
    m.phi.assign(k, std::vector<double>(st.n_terms, 0.0));
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t w = 0; w < st.n_terms; ++w)
            m.phi[t][w] = (st.topic_term[t][w] + beta) /
                          (static_cast<double>(st.topic_total[t]) + vbeta);
    m.theta.assign(st.doc_topic.size(), std::vector<double>(k, 0.0));
    for (std::size_t d = 0; d < st.doc_topic.size(); ++d)
        for (std::size_t t = 0; t < k; ++t)
            m.theta[d][t] = (st.doc_topic[d][t] + alpha) /
                            (static_cast<double>(st.doc_total[d]) + kalpha);
    return m;
}

// Corpus log-likelihood under the current point estimate; used for burn-in
// sanity logging.
inline double point_log_likelihood(const gibbs_state& st, const term_docs& docs,
                                   const lda_config& config) {
    topic_model m = estimate_model(st, config);
    double ll = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t term : docs[d]) {
            double p = 0.0;
            for (std::size_t t = 0; t < st.n_topics; ++t)
                p += m.theta[d][t] * m.phi[t][term];
            ll += std::log(p);
        }
    }
    return ll;
}

using lda_log_fn = void (*)(std::size_t sweep, double log_likelihood);

// init, run `sweeps` full sweeps, estimate from the final state. Fully
// deterministic for a fixed (docs, config).
inline topic_model train(const term_docs& docs, std::size_t n_terms,
                         const lda_config& config, lda_log_fn log_fn = nullptr) {
    gibbs_state st = init_state(docs, n_terms, config);
    for (std::size_t s = 1; s <= config.sweeps; ++s) {
        gibbs_sweep(st, docs, config);
        if (log_fn && config.burn_in > 0 &&
            (s == config.burn_in || s == config.sweeps))
            log_fn(s, point_log_likelihood(st, docs, config));
    }
    return estimate_model(st, config);
}

// n highest-probability terms of one topic, ties lexicographic.
inline std::vector<std::string> top_words(const topic_model& model,
                                          const vocabulary& vocab,
                                          std::size_t topic, std::size_t n) {
    const auto& row = model.phi.at(topic);
    std::vector<std::size_t> order(row.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return vocab.terms[a] < vocab.terms[b];
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < order.size() && i < n; ++i)
        out.push_back(vocab.terms[order[i]]);
    return out;
}

// Cluster tags: average theta over the cluster's documents, keep topics with
// mean mass >= min_mass (descending, capped), render each as its top-3 words
// joined by '-'.
inline std::vector<std::string> assign_tags(const topic_model& model,
                                            const std::vector<std::size_t>& doc_indices,
                                            const vocabulary& vocab,
                                            double min_mass = 0.15,
                                            std::size_t max_tags = 3) {
    if (doc_indices.empty() || model.theta.empty()) return {};
    const std::size_t k = model.theta.front().size();
    std::vector<double> mean(k, 0.0);
    for (std::size_t d : doc_indices)
        for (std::size_t t = 0; t < k; ++t) mean[t] += model.theta.at(d)[t];
    for (auto& v : mean) v /= static_cast<double>(doc_indices.size());
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mean[a] != mean[b]) return mean[a] > mean[b];
        return a < b;
    });
    std::vector<std::string> tags;
    for (std::size_t t : order) {
        if (tags.size() >= max_tags || mean[t] < min_mass) break;
        auto words = top_words(model, vocab, t, 3);
        std::string tag;
        for (const auto& w : words) {
            if (!tag.empty()) tag += "-";
            tag += w;
        }
        if (!tag.empty()) tags.push_back(tag);
    }
    return tags;
}

}  // namespace cadejo
