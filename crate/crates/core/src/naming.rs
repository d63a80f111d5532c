//! Identifier conversion from PL/SQL names to Java names.

const JAVA_RESERVED: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "false", "final",
    "finally", "float", "for", "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "null", "package", "private", "protected", "public",
    "return", "short", "static", "strictfp", "super", "switch", "synchronized", "this", "throw",
    "throws", "transient", "true", "try", "void", "volatile", "while", "var", "record", "yield",
    "map",
];

fn words(name: &str) -> Vec<String> {
    name.split(|c: char| c == '_' || c == '-' || c == '.' || c == '$' || c == '#' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// `NEW_GRANT_BUTTON` -> `NewGrantButton`.
pub fn pascal_case(name: &str) -> String {
    let out: String = words(name).iter().map(|w| capitalize(w)).collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        format!("_{out}")
    } else {
        out
    }
}

/// `normalize_company_name` -> `normalizeCompanyName`. Reserved words and names
/// starting with a digit get a `_` prefix.
pub fn camel_case(name: &str) -> String {
    let ws = words(name);
    let mut out = String::new();
    for (i, w) in ws.iter().enumerate() {
        if i == 0 {
            out.push_str(w);
        } else {
            out.push_str(&capitalize(w));
        }
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) || JAVA_RESERVED.contains(&out.as_str()) {
        format!("_{out}")
    } else {
        out
    }
}

/// `RenewGrantsService` -> `renewGrantsService`.
pub fn lower_first(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// `grantCode` -> `GrantCode`.
pub fn upper_first(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// Shared-map key for a variable or UI item: camelCase of the bare name.
pub fn map_key(name: &str) -> String {
    camel_case(name)
}

/// Returns `base` if unused, otherwise `base2`, `base3`, ... and records the choice.
pub fn unique_name(base: &str, taken: &mut std::collections::BTreeSet<String>) -> String {
    if taken.insert(base.to_string()) {
        return base.to_string();
    }
    let mut n = 2;
    loop {
        let candidate = format!("{base}{n}");
        if taken.insert(candidate.clone()) {
            return candidate;
        }
        n += 1;
    }
}
