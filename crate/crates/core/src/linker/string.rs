use crate::dataset::Schema;
use crate::text;

/// Strength of a question-token/schema-item link, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Link {
    #[default]
    None,
    Cosine,
    Partial,
    Exact,
}

/// Question × table and question × column link grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linking {
    n_question: usize,
    n_table: usize,
    n_column: usize,
    tables: Vec<Link>,
    columns: Vec<Link>,
}

impl Linking {
    pub fn empty(n_question: usize, n_table: usize, n_column: usize) -> Self {
        Linking {
            n_question,
            n_table,
            n_column,
            tables: vec![Link::None; n_question * n_table],
            columns: vec![Link::None; n_question * n_column],
        }
    }

    pub fn n_question(&self) -> usize {
        self.n_question
    }

    pub fn n_table(&self) -> usize {
        self.n_table
    }

    pub fn n_column(&self) -> usize {
        self.n_column
    }

    pub fn table(&self, q: usize, t: usize) -> Link {
        self.tables[q * self.n_table + t]
    }

    pub fn column(&self, q: usize, c: usize) -> Link {
        self.columns[q * self.n_column + c]
    }

    pub(crate) fn set_table(&mut self, q: usize, t: usize, link: Link) {
        self.tables[q * self.n_table + t] = link;
    }

    pub(crate) fn set_column(&mut self, q: usize, c: usize, link: Link) {
        self.columns[q * self.n_column + c] = link;
    }

    /// Keep the stronger of the current and the proposed link.
    fn raise_table(&mut self, q: usize, t: usize, link: Link) {
        let cell = &mut self.tables[q * self.n_table + t];
        *cell = (*cell).max(link);
    }

    fn raise_column(&mut self, q: usize, c: usize, link: Link) {
        let cell = &mut self.columns[q * self.n_column + c];
        *cell = (*cell).max(link);
    }

    pub fn count_tables(&self, link: Link) -> usize {
        self.tables.iter().filter(|l| **l == link).count()
    }

    pub fn count_columns(&self, link: Link) -> usize {
        self.columns.iter().filter(|l| **l == link).count()
    }
}

const STOPWORDS: &[&str] = &[
    "a", "about", "all", "an", "and", "any", "are", "as", "at", "be", "by", "did", "do", "does", "each", "for", "from",
    "give", "has", "have", "how", "in", "is", "it", "its", "list", "many", "me", "much", "of", "on", "or", "show",
    "than", "that", "the", "their", "them", "there", "these", "they", "this", "those", "to", "was", "were", "what",
    "when", "where", "which", "who", "whose", "with",
];

fn is_filler(word: &str) -> bool {
    STOPWORDS.contains(&word) || !word.chars().any(char::is_alphanumeric)
}

/// Whether `span` occurs as a contiguous run inside `words`.
fn contains_run(words: &[String], span: &[String]) -> bool {
    span.len() <= words.len() && words.windows(span.len()).any(|w| w == span)
}

fn link_span(span: &[String], words: &[String]) -> Link {
    if span == words {
        Link::Exact
    } else if span.len() < words.len() && !span.iter().all(|w| is_filler(w)) && contains_run(words, span) {
        Link::Partial
    } else {
        Link::None
    }
}

/// Words of a schema item's display name after text normalization.
pub(crate) fn item_words(name: &str) -> Vec<String> {
    text::normalize(name).split_whitespace().map(str::to_owned).collect()
}

/// Character-level name matching between question tokens and schema items.
///
/// Every contiguous token span is compared with every table and column
/// display name (normalized, split into words). A span equal to the whole
/// name is an exact match; a span found as a strict contiguous run of the
/// name is a partial match, unless the span consists only of stopwords or
/// punctuation. Each token of a matching span receives the link, and a cell
/// keeps the strongest link any span gave it. The `*` column never links.
pub fn string_link(tokens: &[String], schema: &Schema) -> Linking {
    let normalized: Vec<String> = tokens.iter().map(|t| text::normalize(t)).collect();
    let table_words: Vec<Vec<String>> = schema.tables.iter().map(|t| item_words(&t.name_display)).collect();
    let column_words: Vec<Vec<String>> = schema
        .columns
        .iter()
        .map(|c| if c.is_all_columns() { Vec::new() } else { item_words(&c.name_display) })
        .collect();
    let longest = table_words.iter().chain(&column_words).map(Vec::len).max().unwrap_or(0);

    let mut linking = Linking::empty(tokens.len(), schema.tables.len(), schema.columns.len());
    for n in (1..=longest.min(normalized.len())).rev() {
        for start in 0..=normalized.len() - n {
            let span = &normalized[start..start + n];
            if span.iter().any(String::is_empty) {
                continue;
            }
            for (t, words) in table_words.iter().enumerate() {
                let link = link_span(span, words);
                if link != Link::None {
                    (start..start + n).for_each(|q| linking.raise_table(q, t, link));
                }
            }
            for (c, words) in column_words.iter().enumerate() {
                if words.is_empty() {
                    continue;
                }
                let link = link_span(span, words);
                if link != Link::None {
                    (start..start + n).for_each(|q| linking.raise_column(q, c, link));
                }
            }
        }
    }
    linking
}
