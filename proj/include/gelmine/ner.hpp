#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gelmine {

/// Case-sensitive gene symbol lexicon; lookup is exact-match only.
struct Lexicon {
    std::string source_name;
    std::string version;
    std::map<std::string, std::string> entries; // symbol -> identifier

    bool contains(const std::string& symbol) const { return entries.count(symbol) > 0; }

    /// TSV: symbol<TAB>identifier, one per line, '#' comments ignored.
    static Lexicon from_tsv(const std::string& text, std::string source_name,
                            std::string version);
    static Lexicon load(const std::filesystem::path& path);
};

/// Exclusion word lists. Both are matched case-insensitively (ASCII fold).
struct StopLists {
    std::set<std::string> frequent_words; // lowercased
    std::set<std::string> domain_words;   // lowercased

    /// The built-in domain list; the frequent-words list ships as a data
    /// file and is loaded separately.
    static StopLists defaults();
    static std::set<std::string> load_word_list(const std::filesystem::path& path);

    bool stoplisted(const std::string& token) const;
};

/// The 22 built-in domain words (original casing).
const std::vector<std::string>& default_domain_words();

struct GeneMention {
    std::string figure_id;
    int panel_id = -1;
    int label_segment_id = -1;
    std::string token;
    std::string lexicon_id;
    bool partial = false; // matched on a hyphen sub-token only
};

/// Splits on any character outside {ASCII letters, digits, hyphen, Greek
/// letters}; leading/trailing hyphens are stripped, empty results dropped.
std::vector<std::string> tokenize(const std::string& text);

bool is_all_digits(const std::string& token);
bool is_roman_numeral(const std::string& token); // case-insensitive
/// Length < 3 code points, a number (Arabic or Roman), or stoplisted.
bool token_excluded(const std::string& token, const StopLists& stops);

/// Matches surviving tokens case-sensitively against the lexicon; tokens
/// without a whole-token match retry on hyphen-split sub-tokens (>= 3 chars,
/// same exclusions), yielding mentions flagged partial. Only token,
/// lexicon_id and partial are filled in.
std::vector<GeneMention> match_genes(const std::vector<std::string>& tokens,
                                     const Lexicon& lexicon, const StopLists& stops);

struct GeneTokenStats {
    double ratio_all = 0.0;
    double ratio_labels = 0.0;
    long long matched_all = 0;
    long long total_all = 0;
    long long matched_labels = 0;
    long long total_labels = 0;
    bool ratio_all_defined = true;
    bool ratio_labels_defined = true;
};

/// matched / total, once over all text segments and once over gel labels.
/// Zero totals yield ratio 0 with the corresponding defined flag cleared.
GeneTokenStats gene_token_stats(long long matched_all, long long total_all,
                                long long matched_labels, long long total_labels);

} // namespace gelmine
