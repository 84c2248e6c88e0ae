// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/model_space.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <tuple>

#include "discovery/error.hpp"

namespace discovery {

namespace {

Term full_mask(int k) { return (Term{1} << k) - 1; }

void check_k(int k)
{
    if (k < 1 || k > kMaxFactors)
        throw ConfigError("number of factors k=" + std::to_string(k) + " outside supported range 1.."
                          + std::to_string(kMaxFactors));
}

// All terms over k factors in canonical order.
std::vector<Term> all_terms(int k)
{
    std::vector<Term> out;
    for (Term t = 1; t <= full_mask(k); ++t)
        out.push_back(t);
    std::sort(out.begin(), out.end(), term_less);
    return out;
}

} // namespace

int term_order(Term term) { return std::popcount(term); }

std::vector<int> term_factors(Term term)
{
    std::vector<int> out;
    for (int j = 0; j < kMaxFactors; ++j)
        if (term & (Term{1} << j))
            out.push_back(j + 1);
    return out;
}

std::string term_to_string(Term term)
{
    std::string s;
    for (int f : term_factors(term))
        s += "x" + std::to_string(f);
    return s;
}

bool term_less(Term a, Term b)
{
    int oa = term_order(a), ob = term_order(b);
    if (oa != ob)
        return oa < ob;
    return term_factors(a) < term_factors(b);
}

ModelSpec ModelSpec::from_terms(const std::vector<Term>& terms, int k)
{
    check_k(k);
    std::uint64_t bits = 0;
    for (Term t : terms) {
        if (t == 0 || t > full_mask(k))
            throw ConfigError("term references a factor above k=" + std::to_string(k));
        bits |= std::uint64_t{1} << t;
    }
    return ModelSpec(bits, k);
}

int ModelSpec::parameter_count() const { return std::popcount(bits_); }

std::vector<Term> ModelSpec::terms() const
{
    std::vector<Term> out;
    for (Term t = 1; t < 64; ++t)
        if (contains(t))
            out.push_back(t);
    std::sort(out.begin(), out.end(), term_less);
    return out;
}

int ModelSpec::highest_order() const
{
    int best = 0;
    for (Term t : terms())
        best = std::max(best, term_order(t));
    return best;
}

int ModelSpec::highest_order_count() const
{
    int top = highest_order();
    int n = 0;
    for (Term t : terms())
        n += term_order(t) == top;
    return n;
}

bool ModelSpec::is_valid() const
{
    if (!contains(1))
        return false;
    for (Term t : terms()) {
        // every proper nonempty subset must be present
        for (Term sub = (t - 1) & t; sub != 0; sub = (sub - 1) & t)
            if (!contains(sub))
                return false;
    }
    return true;
}

std::string ModelSpec::to_string() const
{
    std::string s;
    for (Term t : terms()) {
        if (!s.empty())
            s += " + ";
        s += term_to_string(t);
    }
    return s;
}

ModelSpec ModelSpec::with_term(Term term) const
{
    return ModelSpec(bits_ | (std::uint64_t{1} << term), k_);
}

ModelSpec ModelSpec::without_terms_containing(int factor) const
{
    std::uint64_t bits = bits_;
    Term f = Term{1} << (factor - 1);
    for (Term t = 1; t < 64; ++t)
        if (t & f)
            bits &= ~(std::uint64_t{1} << t);
    return ModelSpec(bits, k_);
}

ModelSpec hierarchical_closure(const std::vector<Term>& terms, int k)
{
    if (terms.empty())
        throw ConfigError("closure of an empty term set");
    ModelSpec m = ModelSpec::from_terms(terms, k).with_term(1);
    std::uint64_t bits = m.bits();
    for (Term t : m.terms())
        for (Term sub = t; sub != 0; sub = (sub - 1) & t)
            bits |= std::uint64_t{1} << sub;
    std::vector<Term> closed;
    for (Term t = 1; t < 64; ++t)
        if ((bits >> t) & 1u)
            closed.push_back(t);
    return ModelSpec::from_terms(closed, k);
}

ModelSpec parse_model(std::string_view text, int k)
{
    check_k(k);
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            compact += c;
    if (compact.empty())
        throw ConfigError("empty model string");

    std::vector<Term> terms;
    std::size_t pos = 0;
    while (pos <= compact.size()) {
        std::size_t end = compact.find('+', pos);
        if (end == std::string::npos)
            end = compact.size();
        std::string_view tok(compact.data() + pos, end - pos);
        if (tok.empty())
            throw ConfigError("malformed model string '" + std::string(text) + "'");
        Term t = 0;
        std::size_t i = 0;
        while (i < tok.size()) {
            if (tok[i] != 'x' || i + 1 >= tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
                throw ConfigError("malformed term '" + std::string(tok) + "'");
            int f = tok[i + 1] - '0';
            if (f < 1 || f > k)
                throw ConfigError("term '" + std::string(tok) + "' references a factor above k=" + std::to_string(k));
            Term bit = Term{1} << (f - 1);
            if (t & bit)
                throw ConfigError("repeated factor in term '" + std::string(tok) + "'");
            t |= bit;
            i += 2;
        }
        terms.push_back(t);
        pos = end + 1;
    }
    ModelSpec m = ModelSpec::from_terms(terms, k);
    if (static_cast<std::size_t>(m.parameter_count()) != terms.size())
        throw ConfigError("duplicate term in '" + std::string(text) + "'");
    if (!m.is_valid())
        throw ConfigError("model '" + std::string(text) + "' is not hierarchically closed or lacks x1");
    return m;
}

Complexity compare_complexity(const ModelSpec& a, const ModelSpec& b)
{
    auto key = [](const ModelSpec& m) {
        return std::tuple{m.parameter_count(), m.highest_order(), m.highest_order_count()};
    };
    auto ka = key(a), kb = key(b);
    if (ka > kb)
        return Complexity::MoreComplex;
    if (ka < kb)
        return Complexity::LessComplex;
    return Complexity::Indistinguishable;
}

bool canonical_less(const ModelSpec& a, const ModelSpec& b)
{
    switch (compare_complexity(a, b)) {
    case Complexity::LessComplex:
        return true;
    case Complexity::MoreComplex:
        return false;
    case Complexity::Indistinguishable:
        break;
    }
    auto ta = a.terms(), tb = b.terms();
    return std::lexicographical_compare(ta.begin(), ta.end(), tb.begin(), tb.end(), [](Term x, Term y) {
        return term_less(x, y);
    });
}

std::optional<std::size_t> ModelSpace::index_of(const ModelSpec& model) const
{
    auto it = std::find(models_.begin(), models_.end(), model);
    if (it == models_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - models_.begin());
}

std::size_t ModelSpace::index_of(std::string_view text) const
{
    auto idx = index_of(parse_model(text, k_));
    if (!idx)
        throw ConfigError("model '" + std::string(text) + "' not in the model space");
    return *idx;
}

ModelSpace enumerate_models(int k)
{
    check_k(k);
    const std::vector<Term> terms = all_terms(k);

    // Depth-first over terms in canonical order: a term may be included only
    // if all of its immediate sub-terms are already included, so every leaf
    // is a downset of the factor lattice.
    std::vector<ModelSpec> found;
    auto recurse = [&](auto&& self, std::size_t idx, std::uint64_t bits) -> void {
        if (idx == terms.size()) {
            if ((bits >> 1) & 1u) {
                std::vector<Term> list;
                for (Term t = 1; t < 64; ++t)
                    if ((bits >> t) & 1u)
                        list.push_back(t);
                found.push_back(ModelSpec::from_terms(list, k));
            }
            return;
        }
        Term t = terms[idx];
        self(self, idx + 1, bits);
        bool ok = true;
        if (term_order(t) > 1)
            for (int j = 0; j < k && ok; ++j)
                if (t & (Term{1} << j))
                    ok = (bits >> (t & ~(Term{1} << j))) & 1u;
        if (ok)
            self(self, idx + 1, bits | (std::uint64_t{1} << t));
    };
    recurse(recurse, 0, 0);

    std::sort(found.begin(), found.end(), canonical_less);
    ModelSpace space;
    space.k_ = k;
    space.models_ = std::move(found);
    return space;
}

std::vector<std::size_t> tess_neighbors(std::size_t mg, const ModelSpace& space)
{
    const ModelSpec& g = space[mg];
    std::vector<std::size_t> out;
    auto push = [&](const ModelSpec& m) {
        auto idx = space.index_of(m);
        if (idx && *idx != mg && std::find(out.begin(), out.end(), *idx) == out.end())
            out.push_back(*idx);
    };
    for (int f = 1; f <= space.k(); ++f) {
        Term main = Term{1} << (f - 1);
        if (!g.contains(main))
            push(g.with_term(main));
        else if (f != 1)
            push(g.without_terms_containing(f));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> bo_moves(std::size_t mg, const ModelSpace& space)
{
    const ModelSpec& g = space[mg];
    std::vector<std::size_t> out;
    for (Term t = 1; t <= full_mask(space.k()); ++t) {
        if (term_order(t) < 2 || g.contains(t))
            continue;
        auto terms = g.terms();
        terms.push_back(t);
        auto idx = space.index_of(hierarchical_closure(terms, space.k()));
        if (idx && *idx != mg && std::find(out.begin(), out.end(), *idx) == out.end())
            out.push_back(*idx);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace discovery
