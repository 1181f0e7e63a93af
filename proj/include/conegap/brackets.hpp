#pragma once

#include "conegap/vector_field.hpp"

#include <map>
#include <memory>

namespace conegap {

// Formal iterated bracket: a binary tree over letters X1, X2, ...
class FormalBracket {
public:
    static FormalBracket leaf(int letter);
    static FormalBracket node(FormalBracket left, FormalBracket right);
    static FormalBracket parse(const std::string& text);

    bool is_leaf() const { return impl_->letter > 0; }
    int letter() const { return impl_->letter; }
    FormalBracket left() const;
    FormalBracket right() const;

    int length() const;  // number of leaves
    std::string to_string() const;

private:
    struct Impl {
        int letter = 0;  // > 0 for leaves
        std::shared_ptr<const Impl> left, right;
    };
    explicit FormalBracket(std::shared_ptr<const Impl> i) : impl_(std::move(i)) {}
    std::shared_ptr<const Impl> impl_;
};

// r_B = 1 on letters, r_B = 2(r_B1 + r_B2) on nodes.
long switch_number(const FormalBracket& B);

struct SmoothnessRequirement {
    std::map<int, int> per_letter;  // letter -> required C-class
    // The depth rule is validated against the worked examples up to length 4
    // only; deeper brackets carry this flag.
    bool rule_unverified_beyond_length_4 = false;
};

// Required class per letter for (B, h) to be an admissible C^k pair:
// k + the letter's maximum nesting depth.
SmoothnessRequirement required_smoothness(const FormalBracket& B, int k);

// A formal bracket together with fields assigned to letters (letter i ->
// fields[i-1]).
struct BracketAssignment {
    FormalBracket bracket;
    std::vector<VectorFieldExpr> fields;
};

// The composite vector field B(h), built bottom-up symbolically.
// Throws SmoothnessError (with the offending letter) when a field's declared
// class is below the Def-5.1 requirement at k = 0.
VectorFieldExpr assemble_bracket_field(const BracketAssignment& A);

Vec eval_bracket(const BracketAssignment& A, const Vec& x);

// All admissible C^k bracket pairs of length 2..max_length whose leaves map
// into the given fields (the first m1 controlled fields of a scenario).
// Returns an empty list when no fields are supplied.
std::vector<BracketAssignment> enumerate_goh_brackets(
    const std::vector<VectorFieldExpr>& g_first_block, int max_length, int k);

}  // namespace conegap
