// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Universe of hierarchically closed linear models over k factors.
//
// A term is a nonempty set of factors encoded as a bitmask (bit j <=> factor
// j+1); a singleton is a main effect, a set of size v >= 2 a v-way
// interaction. A model is a set of terms, itself encoded as a bitmask indexed
// by term mask. Every model contains the main effect of factor 1 and is closed
// under taking sub-terms.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace discovery {

inline constexpr int kMaxFactors = 5;

using Term = std::uint32_t;

/// Number of factors in a term (1 for a main effect).
int term_order(Term term);

/// Factor indices (1-based, ascending) making up a term.
std::vector<int> term_factors(Term term);

/// "x1", "x1x2", ...
std::string term_to_string(Term term);

/// Canonical term ordering: by order, then lexicographically by factor list.
bool term_less(Term a, Term b);

class ModelSpec
{
  public:
    ModelSpec() = default;

    /// Builds a model from an explicit term list; does not close it.
    static ModelSpec from_terms(const std::vector<Term>& terms, int k);

    int k() const { return k_; }
    std::uint64_t bits() const { return bits_; }

    bool contains(Term term) const { return (bits_ >> term) & 1u; }
    int parameter_count() const;
    /// Terms in canonical order.
    std::vector<Term> terms() const;
    /// Order of the highest-order term (0 for the empty model).
    int highest_order() const;
    /// Number of terms at the highest order.
    int highest_order_count() const;

    /// True when the model holds x1 and every sub-term of every term.
    bool is_valid() const;

    std::string to_string() const;

    ModelSpec with_term(Term term) const;
    ModelSpec without_terms_containing(int factor) const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

  private:
    ModelSpec(std::uint64_t bits, int k) : bits_(bits), k_(k) {}

    std::uint64_t bits_ = 0;
    int k_ = 0;
};

/// Smallest hierarchically closed superset of `terms` that also holds x1.
/// Throws ConfigError if a term references a factor above k.
ModelSpec hierarchical_closure(const std::vector<Term>& terms, int k);

/// Parses "x1 + x2 + x1x2" (whitespace-insensitive). The result must already
/// be a valid model; closure is not applied.
ModelSpec parse_model(std::string_view text, int k);

enum class Complexity
{
    MoreComplex,
    LessComplex,
    Indistinguishable
};

/// Partial order on model complexity: parameter count, then highest
/// interaction order, then the number of highest-order interactions.
Complexity compare_complexity(const ModelSpec& a, const ModelSpec& b);

/// Canonical total order extending compare_complexity; ties broken by the
/// lexicographic order of the canonical term lists.
bool canonical_less(const ModelSpec& a, const ModelSpec& b);

class ModelSpace
{
  public:
    int k() const { return k_; }
    std::size_t size() const { return models_.size(); }
    const ModelSpec& operator[](std::size_t i) const { return models_[i]; }
    const std::vector<ModelSpec>& models() const { return models_; }

    std::optional<std::size_t> index_of(const ModelSpec& model) const;
    /// Index of a model by its string; throws ConfigError when unknown.
    std::size_t index_of(std::string_view text) const;

  private:
    friend ModelSpace enumerate_models(int k);

    int k_ = 0;
    std::vector<ModelSpec> models_;
};

/// All valid models for k factors, canonically ordered from simple to complex.
/// Supports 1 <= k <= kMaxFactors.
ModelSpace enumerate_models(int k);

/// Models one main effect away from `mg`: add an absent main effect, or drop a
/// main effect other than x1 together with every interaction containing it.
std::vector<std::size_t> tess_neighbors(std::size_t mg, const ModelSpace& space);

/// Closures of `mg` plus one absent interaction term, deduplicated.
std::vector<std::size_t> bo_moves(std::size_t mg, const ModelSpace& space);

} // namespace discovery
