//! Closed-class word lists and small open-class lexicons for the heuristic
//! annotator. All entries are lowercase.

use super::Pos;

const NEGATIONS: &[&str] = &["not", "n't", "never", "no"];

pub fn is_negation(word: &str) -> bool {
    let lower = word.to_lowercase();
    NEGATIONS.contains(&lower.as_str())
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "our", "your", "their", "his", "her",
    "its", "some", "any", "every", "each", "no", "another", "all", "both", "several", "many",
    "few", "much", "more", "most", "such", "what", "which",
];

const PRONOUNS: &[&str] = &[
    "i", "me", "we", "us", "you", "he", "him", "she", "it", "they", "them", "myself",
    "ourselves", "everyone", "everything", "someone", "something", "nothing", "anything",
    "one", "who", "whom", "mine", "ours", "yours", "theirs",
];

const ADPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "from", "with", "without", "for", "by", "about", "near", "after",
    "before", "during", "over", "under", "into", "onto", "than", "like", "across", "around",
    "behind", "beside", "between", "through", "per", "despite", "inside", "outside", "along",
];

const PARTICLES: &[&str] = &["not", "n't", "to", "'s", "up", "out", "off"];

const CONJUNCTIONS: &[&str] = &[
    "and", "but", "or", "nor", "yet", "so", "while", "although", "though", "because", "whereas",
    "if", "when", "since", "unless", "as",
];

/// Tokens that may open a new clause.
pub const CLAUSE_BREAKS: &[&str] = &[
    ",", ";", ":", "and", "but", "or", "yet", "while", "although", "though", "because",
    "whereas", "so", "when", "since",
];

const BE: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "'m", "'re", "isnt", "wasnt",
];

const COPULAS: &[&str] = &[
    "look", "looks", "looked", "taste", "tastes", "tasted", "seem", "seems", "seemed", "smell",
    "smells", "smelled", "smelt", "feel", "feels", "felt", "sound", "sounds", "sounded",
    "become", "becomes", "became", "remain", "remains", "remained", "stay", "stays", "stayed",
    "get", "gets", "got", "turned",
];

const AUXILIARIES: &[&str] = &[
    "do", "does", "did", "have", "has", "had", "will", "would", "can", "ca", "could", "shall",
    "should", "may", "might", "must", "wo", "'ll", "'d", "'ve",
];

const VERBS: &[&str] = &[
    "ordered", "order", "orders", "ate", "eat", "eats", "eaten", "eating", "tried", "try",
    "tries", "love", "loved", "loves", "like", "liked", "likes", "enjoy", "enjoyed", "enjoys",
    "recommend", "recommended", "recommends", "went", "go", "goes", "going", "came", "come",
    "comes", "coming", "serve", "serves", "served", "serving", "make", "makes", "made",
    "visit", "visited", "visits", "wait", "waited", "waiting", "pay", "paid", "pays", "cost",
    "costs", "find", "found", "finds", "think", "thought", "thinks", "know", "knew", "want",
    "wanted", "wants", "need", "needs", "needed", "hate", "hated", "hates", "return",
    "returned", "share", "shared", "queued", "queueing", "arrived", "arrive", "left",
    "leave", "took", "take", "takes", "taken", "give", "gave", "gives", "given", "bring",
    "brought", "cook", "cooked", "cooks", "miss", "missed", "expect", "expected", "ruined",
    "spent", "spend", "felt", "keep", "kept", "says", "said", "say", "let", "lets", "use",
    "used", "melts", "melt", "melted", "comes", "sells", "sell", "sold", "offers", "offer",
    "offered", "packed", "worth", "disappoint", "disappointed", "disappoints",
];

const ADVERBS: &[&str] = &[
    "very", "really", "too", "quite", "so", "extremely", "also", "always", "never", "just",
    "rather", "super", "fairly", "slightly", "overly", "definitely", "totally", "here", "there",
    "again", "still", "even", "only", "ever", "highly", "truly", "especially", "pretty",
    "incredibly", "absolutely", "somewhat", "abit", "bit", "then", "now", "today", "often",
    "sometimes", "usually", "almost", "already", "soon", "well", "way", "perhaps", "maybe",
    "quickly", "actually", "simply", "seriously", "surprisingly", "terribly", "awfully",
    "alright", "enough", "else", "once", "twice", "back", "yesterday", "tonight", "instead",
];

const ADJECTIVES: &[&str] = &[
    "good", "great", "bad", "awful", "terrible", "horrible", "excellent", "amazing",
    "awesome", "delicious", "tasty", "yummy", "bland", "salty", "sweet", "sour", "spicy",
    "bitter", "oily", "greasy", "fresh", "stale", "soggy", "crispy", "crunchy", "tender",
    "tough", "chewy", "juicy", "dry", "hot", "cold", "warm", "lukewarm", "cheap", "expensive",
    "pricey", "affordable", "reasonable", "overpriced", "friendly", "rude", "slow", "fast",
    "quick", "clean", "dirty", "messy", "cosy", "cozy", "noisy", "quiet", "small", "big",
    "large", "huge", "tiny", "generous", "stingy", "nice", "lovely", "beautiful", "pleasant",
    "wonderful", "fantastic", "superb", "perfect", "decent", "average", "mediocre", "okay",
    "ok", "fine", "poor", "disappointing", "outstanding", "authentic", "fragrant", "rich",
    "flavourful", "flavorful", "tasteless", "watery", "thick", "thin", "soft", "hard",
    "fluffy", "smooth", "creamy", "savoury", "savory", "heavy", "light", "long", "short",
    "helpful", "attentive", "polite", "efficient", "cheerful", "busy", "crowded", "empty",
    "popular", "famous", "best", "worst", "better", "worse", "favourite", "favorite",
    "comfortable", "filling", "satisfying", "disgusting", "inedible", "raw", "burnt",
    "undercooked", "overcooked", "rubbery", "mushy", "springy", "silky", "smoky", "fatty",
    "lean", "flaky", "moist", "hearty", "homely", "huge", "unfriendly", "impatient",
    "friendlier", "cheaper", "tastier", "new", "old", "other", "same", "first", "last",
    "next", "whole", "main", "local", "free", "extra", "full", "strong", "weak", "sticky",
    "aromatic", "authentic", "unique", "special", "ordinary", "forgettable", "memorable",
    "wrong", "right", "happy", "sad", "sorry", "worth", "worthy", "impressive", "incredible",
    "fabulous", "delightful", "divine", "heavenly", "gross", "nasty", "lousy", "subpar",
    "sloppy", "limp", "wilted", "sublime", "refreshing", "hygienic", "unhygienic", "spacious",
    "cramped", "stuffy", "airy", "bright", "dark", "loud", "chaotic", "organised",
    "organized", "courteous", "welcoming", "surly", "grumpy", "patient", "pleasant", "warm",
    "generous", "modest", "small", "little", "high", "low", "fair", "unfair",
];

const ADJECTIVE_SUFFIXES: &[&str] = &["ous", "ful", "ive", "able", "ible", "less", "ish", "ic"];

/// Lexical POS guess for a lowercase token. `None` means "decide from
/// context" and is only returned for `'s`.
pub fn lexical_pos(lower: &str) -> Option<Pos> {
    if lower == "'s" {
        return None;
    }
    if !lower.chars().any(char::is_alphanumeric) {
        return Some(Pos::Punct);
    }
    if lower.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',' || c == '$') {
        return Some(Pos::Other);
    }
    if lower == "not" || lower == "n't" || lower == "to" {
        return Some(Pos::Part);
    }
    if lower == "never" {
        return Some(Pos::Adv);
    }
    let pos = if ADJECTIVES.contains(&lower) {
        Pos::Adj
    } else if DETERMINERS.contains(&lower) {
        Pos::Det
    } else if PRONOUNS.contains(&lower) {
        Pos::Pron
    } else if ADPOSITIONS.contains(&lower) {
        Pos::Adp
    } else if CONJUNCTIONS.contains(&lower) && lower != "so" {
        Pos::Other
    } else if is_be(lower) || AUXILIARIES.contains(&lower) || VERBS.contains(&lower) {
        Pos::Verb
    } else if COPULAS.contains(&lower) {
        Pos::Verb
    } else if ADVERBS.contains(&lower) {
        Pos::Adv
    } else if PARTICLES.contains(&lower) {
        Pos::Part
    } else if lower.len() > 4 && lower.ends_with("ly") {
        Pos::Adv
    } else if lower.len() > 4 && ADJECTIVE_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
        Pos::Adj
    } else if lower.len() > 4 && lower.ends_with("ed") {
        Pos::Verb
    } else {
        Pos::Noun
    };
    Some(pos)
}

pub fn is_be(lower: &str) -> bool {
    BE.contains(&lower)
}

/// Verbs that take an adjectival complement describing their subject.
pub fn is_copula(lower: &str) -> bool {
    is_be(lower) || lower == "'s" || COPULAS.contains(&lower)
}

pub fn is_auxiliary(lower: &str) -> bool {
    AUXILIARIES.contains(&lower)
}

pub fn is_clause_break(lower: &str) -> bool {
    CLAUSE_BREAKS.contains(&lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_guesses() {
        assert_eq!(lexical_pos("delicious"), Some(Pos::Adj));
        assert_eq!(lexical_pos("laksa"), Some(Pos::Noun));
        assert_eq!(lexical_pos("is"), Some(Pos::Verb));
        assert_eq!(lexical_pos("n't"), Some(Pos::Part));
        assert_eq!(lexical_pos("."), Some(Pos::Punct));
        assert_eq!(lexical_pos("quickly"), Some(Pos::Adv));
        assert_eq!(lexical_pos("scrumptious"), Some(Pos::Adj));
        assert_eq!(lexical_pos("'s"), None);
        assert!(is_negation("Never"));
        assert!(!is_negation("nothing"));
    }
}
