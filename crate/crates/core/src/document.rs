//! Shared pieces of the line-oriented document formats.

use crate::alphabet::{Alphabet, Bits};
use crate::error::{ParseError, ParseErrorKind};

/// Non-blank lines with `#` comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Splits `key: value` header lines. Transition lines contain `->` and are not headers.
pub(crate) fn header(line: &str) -> Option<(&str, &str)> {
    if line.contains("->") {
        return None;
    }
    let (key, value) = line.split_once(':')?;
    Some((key.trim(), value.trim()))
}

/// Expands a pattern over `{0,1,-}` into concrete vectors, ascending.
pub(crate) fn expand_pattern(
    pattern: &str,
    width: usize,
    what: &'static str,
    line: usize,
) -> Result<Vec<Bits>, ParseError> {
    let chars: Vec<char> = pattern.chars().collect();
    if chars.len() != width {
        return Err(ParseError::new(
            line,
            ParseErrorKind::PatternLength {
                what,
                pattern: pattern.to_owned(),
                expected: width,
                found: chars.len(),
            },
        ));
    }
    let mut fixed = 0u32;
    let mut free_mask = 0u32;
    for (k, c) in chars.iter().enumerate() {
        let bit = 1u32 << (width - 1 - k);
        match c {
            '0' => {}
            '1' => fixed |= bit,
            '-' => free_mask |= bit,
            _ => {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::PatternChar(pattern.to_owned()),
                ))
            }
        }
    }
    // Enumerate submasks of free_mask in ascending order.
    let mut out = Vec::with_capacity(1 << free_mask.count_ones());
    let mut sub = 0u32;
    loop {
        out.push(Bits::new(fixed | sub, width));
        if sub == free_mask {
            break;
        }
        sub = ((sub | !free_mask).wrapping_add(1)) & free_mask;
    }
    Ok(out)
}

/// Parses a `name -> name : lhs/rhs` transition line into its four parts.
pub(crate) fn transition_parts(line: &str) -> Option<(&str, &str, &str, &str)> {
    let (from, rest) = line.split_once("->")?;
    let (to, label) = rest.split_once(':')?;
    let (lhs, rhs) = label.split_once('/')?;
    let from = from.trim();
    let to = to.trim();
    if from.is_empty() || to.is_empty() || from.contains(char::is_whitespace) {
        return None;
    }
    if to.contains(char::is_whitespace) {
        return None;
    }
    Some((from, to, lhs.trim(), rhs.trim()))
}

/// Interface headers common to automaton and program documents.
#[derive(Default)]
pub(crate) struct InterfaceHeaders {
    pub inputs: Option<Vec<String>>,
    pub outputs: Option<Vec<String>>,
    pub null: bool,
}

impl InterfaceHeaders {
    /// Returns `Ok(true)` if the header was consumed.
    pub fn accept(&mut self, key: &str, value: &str, line: usize) -> Result<bool, ParseError> {
        let names = || value.split_whitespace().map(str::to_owned).collect();
        match key {
            "inputs" => set_once(&mut self.inputs, names(), key, line)?,
            "outputs" => set_once(&mut self.outputs, names(), key, line)?,
            "interface" => {
                if value != "null" {
                    return Err(ParseError::new(
                        line,
                        ParseErrorKind::Interface(format!("unknown interface kind `{value}`")),
                    ));
                }
                self.null = true;
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn finish(self, line: usize) -> Result<Alphabet, ParseError> {
        if self.null {
            let inputs = self.inputs.unwrap_or_default();
            let outputs = self.outputs.unwrap_or_default();
            if !inputs.is_empty() || !outputs.is_empty() {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::Interface("null interface declares variables".into()),
                ));
            }
            return Ok(Alphabet::null());
        }
        let inputs = self
            .inputs
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::MissingHeader("inputs")))?;
        let outputs = self
            .outputs
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::MissingHeader("outputs")))?;
        Alphabet::new(inputs, outputs)
            .map_err(|e| ParseError::new(line, ParseErrorKind::Interface(e.to_string())))
    }
}

pub(crate) fn set_once<T>(
    slot: &mut Option<T>,
    value: T,
    key: &str,
    line: usize,
) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::new(
            line,
            ParseErrorKind::DuplicateHeader(key.to_owned()),
        ));
    }
    *slot = Some(value);
    Ok(())
}

pub(crate) fn render_interface(out: &mut String, alphabet: &Alphabet) {
    if alphabet.is_null() {
        out.push_str("interface: null\n");
    }
    out.push_str(&format!("inputs: {}\n", alphabet.inputs().join(" ")).replace(": \n", ":\n"));
    out.push_str(&format!("outputs: {}\n", alphabet.outputs().join(" ")).replace(": \n", ":\n"));
}
