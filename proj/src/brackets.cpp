#include "conegap/brackets.hpp"

#include <cctype>
#include <functional>

namespace conegap {

FormalBracket FormalBracket::leaf(int letter) {
    if (letter < 1) throw DomainError("letter indices are positive");
    auto i = std::make_shared<Impl>();
    i->letter = letter;
    return FormalBracket(std::move(i));
}

FormalBracket FormalBracket::node(FormalBracket left, FormalBracket right) {
    auto i = std::make_shared<Impl>();
    i->left = left.impl_;
    i->right = right.impl_;
    return FormalBracket(std::move(i));
}

FormalBracket FormalBracket::left() const {
    if (is_leaf()) throw DomainError("leaf has no children");
    return FormalBracket(impl_->left);
}

FormalBracket FormalBracket::right() const {
    if (is_leaf()) throw DomainError("leaf has no children");
    return FormalBracket(impl_->right);
}

int FormalBracket::length() const {
    if (is_leaf()) return 1;
    return left().length() + right().length();
}

std::string FormalBracket::to_string() const {
    if (is_leaf()) return "X" + std::to_string(letter());
    return "[" + left().to_string() + "," + right().to_string() + "]";
}

namespace {

class BracketParser {
public:
    explicit BracketParser(const std::string& text) : text_(text) {}

    FormalBracket parse() {
        FormalBracket b = parse_bracket();
        skip_ws();
        if (pos_ < text_.size()) throw ParseError(pos_, "unexpected trailing input");
        return b;
    }

private:
    FormalBracket parse_bracket() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "bracket expected");
        if (text_[pos_] == '[') {
            ++pos_;
            FormalBracket l = parse_bracket();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ',')
                throw ParseError(pos_, "',' expected");
            ++pos_;
            FormalBracket r = parse_bracket();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ']')
                throw ParseError(pos_, "']' expected");
            ++pos_;
            return FormalBracket::node(l, r);
        }
        if (text_[pos_] == 'X' || text_[pos_] == 'x') {
            ++pos_;
            std::size_t start = pos_;
            int idx = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                idx = 10 * idx + (text_[pos_] - '0');
                ++pos_;
            }
            if (pos_ == start || idx < 1) throw ParseError(start, "letter index expected");
            return FormalBracket::leaf(idx);
        }
        throw ParseError(pos_, "'[' or letter expected");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

void collect_depths(const FormalBracket& B, int depth, std::map<int, int>& out) {
    if (B.is_leaf()) {
        auto [it, inserted] = out.try_emplace(B.letter(), depth);
        if (!inserted) it->second = std::max(it->second, depth);
        return;
    }
    collect_depths(B.left(), depth + 1, out);
    collect_depths(B.right(), depth + 1, out);
}

}  // namespace

FormalBracket FormalBracket::parse(const std::string& text) {
    return BracketParser(text).parse();
}

long switch_number(const FormalBracket& B) {
    if (B.is_leaf()) return 1;
    return 2 * (switch_number(B.left()) + switch_number(B.right()));
}

SmoothnessRequirement required_smoothness(const FormalBracket& B, int k) {
    SmoothnessRequirement req;
    std::map<int, int> depths;
    collect_depths(B, 0, depths);
    for (auto [letter, depth] : depths) req.per_letter[letter] = depth + k;
    req.rule_unverified_beyond_length_4 = B.length() > 4;
    return req;
}

VectorFieldExpr assemble_bracket_field(const BracketAssignment& A) {
    SmoothnessRequirement req = required_smoothness(A.bracket, 0);
    for (auto [letter, need] : req.per_letter) {
        if (letter > static_cast<int>(A.fields.size()))
            throw SmoothnessError("letter X" + std::to_string(letter) +
                                      " has no assigned field",
                                  letter);
        auto cls = A.fields[letter - 1].smoothness_class();
        if (cls && *cls < need)
            throw SmoothnessError(
                "field for X" + std::to_string(letter) + " is C^" +
                    std::to_string(*cls) + " but the bracket needs C^" +
                    std::to_string(need),
                letter);
    }
    std::function<VectorFieldExpr(const FormalBracket&)> build =
        [&](const FormalBracket& B) -> VectorFieldExpr {
        if (B.is_leaf()) return A.fields[B.letter() - 1];
        return lie_bracket(build(B.left()), build(B.right()));
    };
    return build(A.bracket);
}

Vec eval_bracket(const BracketAssignment& A, const Vec& x) {
    return assemble_bracket_field(A).eval(x);
}

namespace {

// All bracket shapes with the given number of leaves, letters assigned
// left-to-right as X1..Xlen.
std::vector<FormalBracket> shapes_with_letters(int len, int first_letter) {
    std::vector<FormalBracket> out;
    if (len == 1) {
        out.push_back(FormalBracket::leaf(first_letter));
        return out;
    }
    for (int l = 1; l < len; ++l) {
        auto lefts = shapes_with_letters(l, first_letter);
        auto rights = shapes_with_letters(len - l, first_letter + l);
        for (const auto& a : lefts)
            for (const auto& b : rights) out.push_back(FormalBracket::node(a, b));
    }
    return out;
}

}  // namespace

std::vector<BracketAssignment> enumerate_goh_brackets(
    const std::vector<VectorFieldExpr>& g_first_block, int max_length, int k) {
    std::vector<BracketAssignment> out;
    const int m1 = static_cast<int>(g_first_block.size());
    if (m1 == 0 || max_length < 2) return out;

    for (int len = 2; len <= max_length; ++len) {
        auto shapes = shapes_with_letters(len, 1);
        // every map of the len letters into the m1 fields
        std::vector<int> choice(len, 0);
        for (const auto& shape : shapes) {
            std::fill(choice.begin(), choice.end(), 0);
            for (;;) {
                BracketAssignment A{shape, {}};
                for (int i = 0; i < len; ++i) A.fields.push_back(g_first_block[choice[i]]);

                bool admissible = true;
                SmoothnessRequirement req = required_smoothness(shape, k);
                // a field used by several letters must satisfy the max need
                std::map<int, int> need_per_field;
                for (auto [letter, need] : req.per_letter) {
                    int fi = choice[letter - 1];
                    auto [it, ins] = need_per_field.try_emplace(fi, need);
                    if (!ins) it->second = std::max(it->second, need);
                }
                for (auto [fi, need] : need_per_field) {
                    auto cls = g_first_block[fi].smoothness_class();
                    if (cls && *cls < need) {
                        admissible = false;
                        break;
                    }
                }
                if (admissible) out.push_back(std::move(A));

                int pos = len - 1;
                while (pos >= 0 && choice[pos] == m1 - 1) {
                    choice[pos] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++choice[pos];
            }
        }
    }
    return out;
}

}  // namespace conegap
