//! First-name cleaning.
//!
//! A raw first name becomes an ordered list of lowercase candidate names:
//! initials are removed, multiple names are split apart and parenthesized
//! nicknames are extracted as candidates of their own. Candidates keep the
//! order in which they appear in the raw string.
//!
//! ```
//! use pubcareers::names::clean_first_name;
//!
//! assert_eq!(clean_first_name("sonya f.p.").candidates, ["sonya"]);
//! assert_eq!(clean_first_name("(joe) yong").candidates, ["joe", "yong"]);
//! ```

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedNameSet {
    pub original: String,
    pub candidates: Vec<String>,
}

pub fn clean_first_name(raw: &str) -> CleanedNameSet {
    clean_first_name_with(raw, false)
}

/// Like [`clean_first_name`], optionally folding diacritics to ASCII.
pub fn clean_first_name_with(raw: &str, ascii_fold: bool) -> CleanedNameSet {
    let lowered = raw.trim().to_lowercase();
    let text = if ascii_fold { fold(&lowered) } else { lowered };

    let mut candidates: Vec<String> = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == ',') {
        if token.is_empty() || is_initial(token) {
            continue;
        }
        // Anything still carrying periods is a run of initials or names glued
        // together ("m.anne"); split and keep the parts that are real names.
        for part in token.split('.') {
            let part = part.trim_matches(|c: char| !c.is_alphanumeric());
            if part.chars().count() > 1
                && part.chars().any(char::is_alphabetic)
                && !candidates.iter().any(|c| c == part)
            {
                candidates.push(part.to_string());
            }
        }
    }
    CleanedNameSet {
        original: raw.to_string(),
        candidates,
    }
}

/// A single letter, or up to three letters each followed by a period ("f.p.").
pub fn is_initial(token: &str) -> bool {
    let chars: Vec<char> = token.chars().collect();
    if chars.len() == 1 {
        return true;
    }
    if !chars.len().is_multiple_of(2) || chars.len() > 6 {
        return false;
    }
    chars
        .chunks(2)
        .all(|pair| pair[0].is_alphabetic() && pair[1] == '.')
}

fn fold(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).collect()
}
