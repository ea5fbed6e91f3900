//! Text normalization.

/// Lowercases, maps every non-alphanumeric character to a space, splits on
/// whitespace. Empty input gives an empty list. Unicode alphanumerics are
/// kept as-is (case-folded), so accented words survive.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut normalized = String::with_capacity(text.len());
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for low in ch.to_lowercase() {
                normalized.push(low);
            }
        } else {
            normalized.push(' ');
        }
    }
    normalized.split_whitespace().map(str::to_owned).collect()
}
