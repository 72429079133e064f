use std::cell::RefCell;
use std::collections::HashMap;

use regex::Regex;

thread_local! {
    static COMPILED: RefCell<HashMap<String, Regex>> = RefCell::new(HashMap::new());
}

/// Matches `text` against `pattern`, compiling each distinct pattern once per thread.
pub(crate) fn matches(pattern: &str, text: &str) -> Result<bool, regex::Error> {
    COMPILED.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(re) = cache.get(pattern) {
            return Ok(re.is_match(text));
        }
        let re = Regex::new(pattern)?;
        let hit = re.is_match(text);
        cache.insert(pattern.to_string(), re);
        Ok(hit)
    })
}
