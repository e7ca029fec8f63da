#include "thuelab/symbols.hpp"

#include <cctype>
#include <sstream>

namespace thuelab {

bool is_reserved_token(const std::string& token) {
    return token == "CENT" || token == "DOLLAR" || token == "B";
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

Sym SymbolTable::intern(const std::string& token) {
    if (token.empty()) throw Error("empty symbol token");
    for (unsigned char c : token)
        if (std::isspace(c)) throw Error("symbol token contains whitespace: '" + token + "'");
    if (is_reserved_token(token))
        throw Error("token '" + token + "' is reserved for the machine's sentinels/blank");
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    Sym s = static_cast<Sym>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, s);
    return s;
}

Sym SymbolTable::id(const std::string& token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) throw Error("unknown symbol '" + token + "'");
    return it->second;
}

bool SymbolTable::contains(const std::string& token) const {
    return ids_.count(token) != 0;
}

const std::string& SymbolTable::token(Sym s) const {
    if (s < 0 || s >= size()) throw Error("symbol id out of range");
    return tokens_[static_cast<size_t>(s)];
}

Word SymbolTable::parse_word(const std::string& text) const {
    Word w;
    for (const auto& tok : split_tokens(text)) w.push_back(id(tok));
    return w;
}

std::string SymbolTable::render(const Word& word) const {
    std::string out;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i) out += ' ';
        out += word[i] == kBlank ? "B" : token(word[i]);
    }
    return out;
}

} // namespace thuelab
