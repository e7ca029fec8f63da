#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace thuelab {

// Alphabet symbols are interned to dense ids 0..A-1. kBlank is the tape
// blank B, which is not part of any system alphabet.
using Sym = int32_t;
constexpr Sym kBlank = -1;

using Word = std::vector<Sym>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tokens reserved for the machine's sentinels and blank in file formats.
bool is_reserved_token(const std::string& token);

class SymbolTable {
public:
    // Interns a token; rejects reserved tokens and whitespace.
    Sym intern(const std::string& token);

    // Lookup only; throws if the token is unknown.
    Sym id(const std::string& token) const;
    bool contains(const std::string& token) const;

    const std::string& token(Sym s) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    // Splits `text` on whitespace and maps every token; all tokens must be known.
    Word parse_word(const std::string& text) const;

    // Tokens joined by single spaces. Blank renders as "B".
    std::string render(const Word& word) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, Sym> ids_;
};

std::vector<std::string> split_tokens(const std::string& text);

} // namespace thuelab
