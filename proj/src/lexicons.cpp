#include "wmlab/lexicons.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wmlab/types.hpp"

namespace wmlab {

namespace {

using Classes = std::vector<std::vector<std::string>>;

// Same-POS synonym classes. First member is the pivot-language token's
// anchor; classes double as the back-translation collision classes.
const Classes& noun_classes() {
    static const Classes c = {
        {"street", "road", "avenue", "lane"},
        {"house", "cottage", "cabin", "dwelling"},
        {"river", "stream", "creek", "brook"},
        {"mountain", "hill", "ridge", "peak"},
        {"forest", "woodland", "grove", "thicket"},
        {"teacher", "instructor", "tutor", "mentor"},
        {"doctor", "physician", "surgeon", "medic"},
        {"child", "kid", "youngster", "pupil"},
        {"dog", "hound", "puppy", "terrier"},
        {"cat", "kitten", "tomcat", "tabby"},
        {"bird", "sparrow", "finch", "wren"},
        {"boat", "ship", "vessel", "canoe"},
        {"car", "automobile", "sedan", "wagon"},
        {"book", "volume", "manuscript", "booklet"},
        {"letter", "note", "message", "memo"},
        {"garden", "yard", "orchard", "meadow"},
        {"city", "town", "village", "settlement"},
        {"market", "bazaar", "shop", "stall"},
        {"bridge", "crossing", "overpass", "viaduct"},
        {"machine", "device", "engine", "apparatus"},
        {"signal", "beacon", "alarm", "siren"},
        {"story", "tale", "legend", "fable"},
        {"window", "pane", "casement", "skylight"},
        {"door", "gate", "hatch", "portal"},
        {"farmer", "rancher", "shepherd", "gardener"},
        {"painter", "artist", "sculptor", "illustrator"},
        {"song", "tune", "melody", "ballad"},
        {"storm", "tempest", "squall", "gale"},
        {"meal", "dinner", "supper", "feast"},
        {"coat", "jacket", "cloak", "parka"},
        {"table", "desk", "bench", "counter"},
        {"friend", "companion", "ally", "comrade"},
    };
    return c;
}

const Classes& verb_past_classes() {
    static const Classes c = {
        {"walked", "strolled", "marched", "wandered"},
        {"said", "stated", "remarked", "declared"},
        {"saw", "noticed", "observed", "spotted"},
        {"built", "constructed", "assembled", "erected"},
        {"carried", "hauled", "lugged", "transported"},
        {"watched", "viewed", "eyed", "surveyed"},
        {"found", "discovered", "located", "unearthed"},
        {"made", "created", "produced", "crafted"},
        {"took", "grabbed", "seized", "snatched"},
        {"liked", "enjoyed", "fancied", "favored"},
        {"feared", "dreaded", "distrusted", "loathed"},
        {"wanted", "desired", "craved", "coveted"},
        {"opened", "unlocked", "unsealed", "unlatched"},
        {"closed", "shut", "sealed", "latched"},
        {"moved", "shifted", "relocated", "transferred"},
        {"kept", "retained", "preserved", "guarded"},
        {"sold", "traded", "peddled", "auctioned"},
        {"bought", "purchased", "acquired", "procured"},
        {"fixed", "repaired", "mended", "patched"},
        {"broke", "shattered", "cracked", "smashed"},
        {"asked", "questioned", "queried", "quizzed"},
        {"answered", "replied", "responded", "retorted"},
        {"left", "departed", "exited", "vacated"},
        {"reached", "attained", "gained", "achieved"},
        {"helped", "assisted", "aided", "supported"},
        {"praised", "admired", "applauded", "celebrated"},
        {"visited", "toured", "frequented", "attended"},
        {"studied", "examined", "inspected", "reviewed"},
        {"followed", "trailed", "tracked", "shadowed"},
        {"crossed", "traversed", "spanned", "forded"},
    };
    return c;
}

const Classes& verb_3sg_classes() {
    static const Classes c = {
        {"walks", "strolls", "marches", "wanders"},
        {"makes", "creates", "produces", "crafts"},
        {"sees", "notices", "observes", "spots"},
        {"keeps", "retains", "preserves", "protects"},
    };
    return c;
}

const Classes& verb_gerund_classes() {
    static const Classes c = {
        {"running", "sprinting", "jogging", "racing"},
        {"walking", "strolling", "marching", "wandering"},
        {"singing", "humming", "chanting", "crooning"},
        {"painting", "sketching", "drawing", "drafting"},
        {"resting", "relaxing", "lounging", "dozing"},
    };
    return c;
}

const Classes& adjective_neutral_classes() {
    static const Classes c = {
        {"big", "large", "huge", "vast"},
        {"small", "tiny", "little", "miniature"},
        {"old", "ancient", "aged", "antique"},
        {"new", "fresh", "recent", "modern"},
        {"quiet", "silent", "hushed", "muted"},
        {"narrow", "slim", "slender", "thin"},
        {"wide", "broad", "spacious", "roomy"},
        {"cold", "chilly", "frosty", "icy"},
        {"warm", "mild", "balmy", "toasty"},
    };
    return c;
}

const Classes& adjective_positive_classes() {
    static const Classes c = {
        {"good", "fine", "pleasant", "agreeable", "excellent"},
        {"great", "grand", "splendid", "superb"},
        {"happy", "glad", "cheerful", "joyful"},
        {"bright", "radiant", "gleaming", "luminous"},
        {"wonderful", "marvelous", "delightful", "charming"},
        {"gentle", "tender", "kindly", "mellow"},
        {"lovely", "beautiful", "graceful", "elegant"},
        {"brave", "bold", "valiant", "fearless"},
        {"calm", "peaceful", "serene", "tranquil"},
    };
    return c;
}

const Classes& adjective_negative_classes() {
    static const Classes c = {
        {"bad", "poor", "dreadful", "awful"},
        {"sad", "gloomy", "mournful", "sorrowful"},
        {"dark", "murky", "dim", "shadowy"},
        {"angry", "furious", "irate", "enraged"},
        {"broken", "ruined", "damaged", "faulty"},
        {"terrible", "horrible", "ghastly", "frightful"},
        {"ugly", "hideous", "unsightly", "grim"},
        {"weary", "tired", "exhausted", "drained"},
        {"dangerous", "risky", "unsafe", "perilous"},
    };
    return c;
}

const Classes& adverb_classes() {
    static const Classes c = {
        {"quickly", "rapidly", "swiftly", "speedily"},
        {"slowly", "gradually", "leisurely", "sluggishly"},
        {"quietly", "softly", "silently", "faintly"},
        {"loudly", "noisily", "sharply", "harshly"},
        {"carefully", "cautiously", "gingerly", "warily"},
        {"eagerly", "keenly", "avidly", "readily"},
        {"often", "frequently", "regularly", "repeatedly"},
        {"rarely", "seldom", "infrequently", "occasionally"},
    };
    return c;
}

// Function words rewrite too under LLM-grade paraphrasing; these classes
// keep the POS while varying the surface.
const Classes& function_word_classes() {
    static const Classes c = {
        {"in", "within", "inside"},
        {"on", "upon"},
        {"at", "near", "beside"},
        {"under", "below", "beneath"},
        {"over", "above"},
        {"through", "across"},
        {"behind", "beyond"},
        {"toward", "into"},
        {"along", "around"},
        {"during", "throughout"},
        {"this", "that"},
        {"each", "every"},
        {"some", "any"},
        {"another", "either"},
        {"he", "she"},
        {"they", "we"},
        {"him", "her"},
        {"them", "us"},
        {"and", "or"},
        {"but", "yet"},
    };
    return c;
}

std::vector<std::string> flatten(const Classes& classes) {
    std::vector<std::string> out;
    for (const auto& cls : classes)
        for (const auto& w : cls) out.push_back(w);
    return out;
}

WordLists build_wordlists() {
    WordLists wl;
    wl.determiners = {"the", "a",   "an",      "this",    "that",  "each",
                      "every", "some", "another", "either", "any"};
    wl.prepositions = {"in",     "on",     "at",     "under",  "over",   "near",   "through",
                       "across", "behind", "beside", "within", "during", "against", "toward",
                       "along",  "around", "beyond", "into",   "from",   "with",   "of",
                       "about",  "between", "above", "below",  "inside", "upon",   "beneath",
                       "throughout"};
    wl.pronouns = {"he", "she", "it", "they", "we", "i", "you", "him", "her", "them", "us"};
    wl.conjunctions = {"and", "but", "or", "nor", "yet"};
    wl.negators = {"not", "no", "never", "without", "hardly", "barely", "scarcely"};

    wl.nouns = flatten(noun_classes());
    wl.verbs_past = flatten(verb_past_classes());
    wl.verbs_3sg = flatten(verb_3sg_classes());
    wl.verbs_gerund = flatten(verb_gerund_classes());
    wl.adjectives_neutral = flatten(adjective_neutral_classes());
    wl.adjectives_positive = flatten(adjective_positive_classes());
    wl.adjectives_negative = flatten(adjective_negative_classes());

    wl.adverbs = flatten(adverb_classes());
    for (const char* extra : {"always", "soon", "again", "almost", "nearly", "really",
                              "very", "sometimes", "together", "away", "back", "early", "late"})
        wl.adverbs.push_back(extra);

    for (const auto* group : {&noun_classes(), &verb_past_classes(), &verb_3sg_classes(),
                              &verb_gerund_classes(), &adjective_neutral_classes(),
                              &adjective_positive_classes(), &adjective_negative_classes(),
                              &adverb_classes(), &function_word_classes()})
        for (const auto& cls : *group) wl.synonym_classes.push_back(cls);
    return wl;
}

}  // namespace

const WordLists& embedded_wordlists() {
    static const WordLists wl = build_wordlists();
    return wl;
}

SynonymTable SynonymTable::embedded() {
    SynonymTable t;
    for (const auto& cls : embedded_wordlists().synonym_classes) {
        for (const auto& word : cls) {
            auto& alts = t.alts[word];
            for (const auto& other : cls)
                if (other != word) alts.push_back(other);
        }
    }
    return t;
}

SynonymTable SynonymTable::from_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open synonym table: " + path);
    SynonymTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("synonym table line missing TAB: " + line);
        std::string word = line.substr(0, tab);
        std::string rest = line.substr(tab + 1);
        std::vector<std::string> alts;
        std::stringstream ss(rest);
        std::string alt;
        while (std::getline(ss, alt, ','))
            if (!alt.empty() && alt != word) alts.push_back(alt);
        t.alts[word] = std::move(alts);
    }
    return t;
}

BilingualLexicon BilingualLexicon::from_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) {
    BilingualLexicon lex;
    for (const auto& [word, pivot] : pairs) {
        lex.forward[word] = pivot;
        lex.reverse[pivot].push_back(word);
    }
    return lex;
}

BilingualLexicon BilingualLexicon::embedded() {
    std::vector<std::pair<std::string, std::string>> pairs;
    int idx = 0;
    for (const auto& cls : embedded_wordlists().synonym_classes) {
        char pivot[16];
        std::snprintf(pivot, sizeof(pivot), "p%03d", idx++);
        for (const auto& word : cls) pairs.emplace_back(word, pivot);
    }
    return from_pairs(pairs);
}

BilingualLexicon BilingualLexicon::from_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open bilingual lexicon: " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("bilingual lexicon line missing TAB: " + line);
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return from_pairs(pairs);
}

SentimentLexicon SentimentLexicon::embedded() {
    SentimentLexicon lex;
    lex.negators = embedded_wordlists().negators;
    auto add_class = [&](const Classes& classes, double valence) {
        for (const auto& cls : classes)
            for (const auto& w : cls) lex.valence[w] = valence;
    };
    add_class(adjective_positive_classes(), 0.7);
    add_class(adjective_negative_classes(), -0.7);
    // verb classes with affective load
    const std::vector<std::pair<std::string, double>> verbs = {
        {"liked", 0.5},  {"enjoyed", 0.5},  {"fancied", 0.5},  {"favored", 0.5},
        {"praised", 0.7}, {"admired", 0.7}, {"applauded", 0.7}, {"celebrated", 0.7},
        {"helped", 0.4}, {"assisted", 0.4}, {"aided", 0.4},     {"supported", 0.4},
        {"feared", -0.6}, {"dreaded", -0.6}, {"distrusted", -0.6}, {"loathed", -0.8},
        {"broke", -0.4}, {"shattered", -0.5}, {"cracked", -0.4}, {"smashed", -0.5},
        {"wanted", 0.2}, {"desired", 0.2},  {"craved", 0.2},   {"coveted", -0.1},
    };
    for (const auto& [w, v] : verbs) lex.valence[w] = v;
    // a few affective nouns
    const std::vector<std::pair<std::string, double>> nouns = {
        {"storm", -0.3}, {"tempest", -0.3}, {"squall", -0.3}, {"gale", -0.3},
        {"feast", 0.4},  {"friend", 0.4},   {"companion", 0.4}, {"ally", 0.3}, {"comrade", 0.3},
        {"alarm", -0.3}, {"siren", -0.2},
    };
    for (const auto& [w, v] : nouns) lex.valence[w] = v;
    return lex;
}

SentimentLexicon SentimentLexicon::from_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open sentiment lexicon: " + path);
    SentimentLexicon lex;
    lex.negators = embedded_wordlists().negators;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("sentiment lexicon line missing TAB: " + line);
        lex.valence[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    }
    return lex;
}

}  // namespace wmlab
