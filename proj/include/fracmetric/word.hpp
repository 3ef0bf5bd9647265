#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fracmetric {

/// A finite word over the cell alphabet {1..k}. The empty word is the root
/// cell; concatenation composes the cell maps left to right.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<int> letters) {
        for (int l : letters) push_back(l);
    }
    explicit Word(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {}

    static Word repeat(int letter, size_t times) {
        return Word(std::vector<std::uint8_t>(times, static_cast<std::uint8_t>(letter)));
    }

    size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int operator[](size_t pos) const { return letters_[pos]; }
    const std::vector<std::uint8_t>& letters() const { return letters_; }

    void push_back(int letter) {
        if (letter < 1 || letter > 255) throw std::out_of_range("cell index out of range");
        letters_.push_back(static_cast<std::uint8_t>(letter));
    }

    Word operator+(const Word& rhs) const {
        Word out = *this;
        out.letters_.insert(out.letters_.end(), rhs.letters_.begin(), rhs.letters_.end());
        return out;
    }

    bool has_prefix(const Word& prefix) const {
        if (prefix.size() > size()) return false;
        return std::equal(prefix.letters_.begin(), prefix.letters_.end(), letters_.begin());
    }

    Word prefix(size_t len) const {
        return Word(std::vector<std::uint8_t>(letters_.begin(), letters_.begin() + len));
    }

    /// Neither word is a prefix of the other.
    bool incomparable(const Word& other) const { return !has_prefix(other) && !other.has_prefix(*this); }

    /// Position of the word among W_{|w|} in lexicographic order.
    std::uint64_t index(int k) const {
        std::uint64_t idx = 0;
        for (auto l : letters_) idx = idx * static_cast<std::uint64_t>(k) + (l - 1);
        return idx;
    }

    static Word from_index(std::uint64_t idx, size_t length, int k) {
        std::vector<std::uint8_t> letters(length);
        for (size_t t = length; t-- > 0;) {
            letters[t] = static_cast<std::uint8_t>(idx % k + 1);
            idx /= k;
        }
        return Word(std::move(letters));
    }

    /// Digit string for k <= 9, dot-separated integers otherwise; "e" when empty.
    std::string str(int k) const {
        if (letters_.empty()) return "e";
        std::string s;
        for (size_t t = 0; t < letters_.size(); ++t) {
            if (k > 9 && t) s += '.';
            s += std::to_string(letters_[t]);
        }
        return s;
    }

    static Word parse(std::string_view text, int k) {
        if (text == "e") return {};
        Word w;
        if (k <= 9) {
            for (char c : text) {
                if (c < '1' || c > '9' || c - '0' > k)
                    throw std::invalid_argument("bad word '" + std::string(text) + "'");
                w.push_back(c - '0');
            }
        } else {
            size_t pos = 0;
            while (pos <= text.size()) {
                size_t dot = text.find('.', pos);
                if (dot == std::string_view::npos) dot = text.size();
                auto part = std::string(text.substr(pos, dot - pos));
                if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
                    throw std::invalid_argument("bad word '" + std::string(text) + "'");
                int letter = std::stoi(part);
                if (letter < 1 || letter > k)
                    throw std::invalid_argument("bad word '" + std::string(text) + "'");
                w.push_back(letter);
                pos = dot + 1;
            }
        }
        if (w.empty()) throw std::invalid_argument("empty word must be written 'e'");
        return w;
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& a, const Word& b) { return a.letters_ <=> b.letters_; }

private:
    std::vector<std::uint8_t> letters_;
};

/// All words of length exactly `len`, in lexicographic order.
inline std::vector<Word> words_of_length(int k, size_t len) {
    std::uint64_t count = 1;
    for (size_t t = 0; t < len; ++t) count *= static_cast<std::uint64_t>(k);
    std::vector<Word> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(Word::from_index(i, len, k));
    return out;
}

/// All words of length at most `len`, shorter first, then lexicographic.
inline std::vector<Word> words_up_to(int k, size_t len) {
    std::vector<Word> out;
    for (size_t l = 0; l <= len; ++l) {
        auto layer = words_of_length(k, l);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

} // namespace fracmetric
