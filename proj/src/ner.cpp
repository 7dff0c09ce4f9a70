#include "gelmine/ner.hpp"

#include "gelmine/util.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace gelmine {

Lexicon Lexicon::from_tsv(const std::string& text, std::string source_name, std::string version) {
    Lexicon lex;
    lex.source_name = std::move(source_name);
    lex.version = std::move(version);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ValidationError("lexicon line " + std::to_string(lineno) +
                                  " is not symbol<TAB>identifier");
        }
        lex.entries[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    return from_tsv(read_text_file(path), path.filename().string(), "file");
}

const std::vector<std::string>& default_domain_words() {
    static const std::vector<std::string> words = {
        "min",     "hrs",      "line",    "type",    "protein", "DNA",
        "RNA",     "mRNA",     "membrane", "gel",     "fold",    "fragment",
        "antigen", "enzyme",   "kinase",  "cleavage", "factor",  "blot",
        "pro",     "pre",      "peptide", "cell"};
    return words;
}

namespace {

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

StopLists StopLists::defaults() {
    StopLists lists;
    for (const std::string& w : default_domain_words()) lists.domain_words.insert(ascii_lower(w));
    return lists;
}

std::set<std::string> StopLists::load_word_list(const std::filesystem::path& path) {
    std::set<std::string> words;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.insert(ascii_lower(line));
    }
    return words;
}

bool StopLists::stoplisted(const std::string& token) const {
    const std::string lower = ascii_lower(token);
    return frequent_words.count(lower) > 0 || domain_words.count(lower) > 0;
}

namespace {

bool is_token_char(char32_t c) {
    if (c >= 'A' && c <= 'Z') return true;
    if (c >= 'a' && c <= 'z') return true;
    if (c >= '0' && c <= '9') return true;
    if (c == '-') return true;
    if (c >= 0x0391 && c <= 0x03A9) return true; // Greek capitals
    if (c >= 0x03B1 && c <= 0x03C9) return true; // Greek lowercase
    return false;
}

std::string strip_hyphens(const std::string& token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && token[begin] == '-') ++begin;
    while (end > begin && token[end - 1] == '-') --end;
    return token.substr(begin, end - begin);
}

} // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t cp : utf8_decode(text)) {
        if (is_token_char(cp)) {
            utf8_append(current, cp);
        } else if (!current.empty()) {
            const std::string stripped = strip_hyphens(current);
            if (!stripped.empty()) tokens.push_back(stripped);
            current.clear();
        }
    }
    if (!current.empty()) {
        const std::string stripped = strip_hyphens(current);
        if (!stripped.empty()) tokens.push_back(stripped);
    }
    return tokens;
}

bool is_all_digits(const std::string& token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

bool is_roman_numeral(const std::string& token) {
    if (token.empty()) return false;
    // Standard grammar M{0,3}(CM|CD|D?C{0,3})(XC|XL|L?X{0,3})(IX|IV|V?I{0,3}),
    // matched case-insensitively over the whole token.
    const std::string u = [&] {
        std::string s = token;
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        return s;
    }();
    for (char c : u) {
        if (std::string("MDCLXVI").find(c) == std::string::npos) return false;
    }
    std::size_t i = 0;
    auto take = [&](const std::string& s) {
        if (u.compare(i, s.size(), s) == 0) {
            i += s.size();
            return true;
        }
        return false;
    };
    for (int k = 0; k < 3 && take("M"); ++k) {
    }
    if (!take("CM") && !take("CD")) {
        take("D");
        for (int k = 0; k < 3 && take("C"); ++k) {
        }
    }
    if (!take("XC") && !take("XL")) {
        take("L");
        for (int k = 0; k < 3 && take("X"); ++k) {
        }
    }
    if (!take("IX") && !take("IV")) {
        take("V");
        for (int k = 0; k < 3 && take("I"); ++k) {
        }
    }
    return i == u.size();
}

bool token_excluded(const std::string& token, const StopLists& stops) {
    if (utf8_length(token) < 3) return true;
    if (is_all_digits(token)) return true;
    if (is_roman_numeral(token)) return true;
    return stops.stoplisted(token);
}

std::vector<GeneMention> match_genes(const std::vector<std::string>& tokens,
                                     const Lexicon& lexicon, const StopLists& stops) {
    std::vector<GeneMention> mentions;
    for (const std::string& token : tokens) {
        if (token_excluded(token, stops)) continue;
        const auto it = lexicon.entries.find(token);
        if (it != lexicon.entries.end()) {
            GeneMention m;
            m.token = token;
            m.lexicon_id = it->second;
            mentions.push_back(std::move(m));
            continue;
        }
        // No whole-token match: retry on hyphen-split sub-tokens.
        if (token.find('-') == std::string::npos) continue;
        std::istringstream parts(token);
        std::string sub;
        while (std::getline(parts, sub, '-')) {
            if (sub.empty() || token_excluded(sub, stops)) continue;
            const auto sit = lexicon.entries.find(sub);
            if (sit == lexicon.entries.end()) continue;
            GeneMention m;
            m.token = sub;
            m.lexicon_id = sit->second;
            m.partial = true;
            mentions.push_back(std::move(m));
        }
    }
    return mentions;
}

GeneTokenStats gene_token_stats(long long matched_all, long long total_all,
                                long long matched_labels, long long total_labels) {
    GeneTokenStats stats;
    stats.matched_all = matched_all;
    stats.total_all = total_all;
    stats.matched_labels = matched_labels;
    stats.total_labels = total_labels;
    if (total_all > 0) {
        stats.ratio_all = static_cast<double>(matched_all) / static_cast<double>(total_all);
    } else {
        stats.ratio_all_defined = false;
    }
    if (total_labels > 0) {
        stats.ratio_labels =
            static_cast<double>(matched_labels) / static_cast<double>(total_labels);
    } else {
        stats.ratio_labels_defined = false;
    }
    return stats;
}

} // namespace gelmine
