//! Boolean interfaces, bit vectors, events and words.
//!
//! A bit vector stores the k-th declared variable in bit `width - 1 - k`, so
//! the numeric value of a vector equals its rendered bit string read as a
//! binary number. Ordering vectors by value is therefore the same as ordering
//! their renderings lexicographically.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Upper bound on `|I| + |O|`; alphabets are enumerated explicitly.
pub const MAX_INTERFACE_WIDTH: usize = 16;

/// Fixed-width Boolean vector over a declared variable list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    value: u32,
    width: u8,
}

impl Bits {
    /// Builds a vector from its numeric value.
    ///
    /// # Panics
    ///
    /// Panics if `value` does not fit in `width` bits.
    pub fn new(value: u32, width: usize) -> Self {
        assert!(width <= MAX_INTERFACE_WIDTH, "bit vector too wide");
        assert!(
            value < (1u32 << width),
            "value {value} does not fit in {width} bits"
        );
        Bits {
            value,
            width: width as u8,
        }
    }

    pub fn zero(width: usize) -> Self {
        Bits::new(0, width)
    }

    /// Builds a vector from per-variable values in declaration order.
    pub fn from_bools(bits: &[bool]) -> Self {
        let value = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Bits::new(value, bits.len())
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Value of the `k`-th declared variable.
    pub fn get(self, k: usize) -> bool {
        assert!(k < self.width(), "variable index out of range");
        (self.value >> (self.width() - 1 - k)) & 1 == 1
    }

    pub fn hamming(self, other: Bits) -> u32 {
        debug_assert_eq!(self.width, other.width);
        (self.value ^ other.value).count_ones()
    }

    /// Every vector of the given width, in ascending numeric order.
    pub fn all(width: usize) -> impl Iterator<Item = Bits> + Clone {
        assert!(width <= MAX_INTERFACE_WIDTH, "bit vector too wide");
        (0..(1u32 << width)).map(move |v| Bits::new(v, width))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.width() {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.len() > MAX_INTERFACE_WIDTH {
            return Err(Error::InvalidBits(s.to_owned()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBits(s.to_owned())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Bits::from_bools(&bits))
    }
}

/// One reaction: the input vector read and the output vector emitted in a tick.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub input: Bits,
    pub output: Bits,
}

impl Event {
    pub fn new(input: Bits, output: Bits) -> Self {
        Event { input, output }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.input, self.output)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.input, self.output)
    }
}

impl FromStr for Event {
    type Err = Error;

    /// Parses `x/y`, e.g. `10/1`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let (input, output) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidBits(s.to_owned()))?;
        Ok(Event::new(input.trim().parse()?, output.trim().parse()?))
    }
}

/// Ordered Boolean input and output variables of a reactive interface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Alphabet {
    /// Both lists must be non-empty; use [`Alphabet::null`] for the empty interface.
    pub fn new<S: Into<String>>(
        inputs: impl IntoIterator<Item = S>,
        outputs: impl IntoIterator<Item = S>,
    ) -> Result<Self, Error> {
        let alphabet = Self::unchecked(inputs, outputs)?;
        if alphabet.inputs.is_empty() || alphabet.outputs.is_empty() {
            return Err(Error::EmptyInterface);
        }
        Ok(alphabet)
    }

    /// Interface with no inputs and no outputs. Its only event is `/`.
    pub fn null() -> Self {
        Alphabet {
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub(crate) fn unchecked<S: Into<String>>(
        inputs: impl IntoIterator<Item = S>,
        outputs: impl IntoIterator<Item = S>,
    ) -> Result<Self, Error> {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for name in inputs.iter().chain(&outputs) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateVariable(name.clone()));
            }
        }
        if inputs.len() + outputs.len() > MAX_INTERFACE_WIDTH {
            return Err(Error::InterfaceTooWide(inputs.len() + outputs.len()));
        }
        Ok(Alphabet { inputs, outputs })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn is_null(&self) -> bool {
        self.inputs.is_empty() && self.outputs.is_empty()
    }

    pub fn input_width(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_width(&self) -> usize {
        self.outputs.len()
    }

    /// `|Σ_I|`
    pub fn input_count(&self) -> usize {
        1 << self.inputs.len()
    }

    /// `|Σ_O|`
    pub fn output_count(&self) -> usize {
        1 << self.outputs.len()
    }

    /// `|Σ| = |Σ_I| · |Σ_O|`
    pub fn event_count(&self) -> usize {
        self.input_count() * self.output_count()
    }

    pub fn input_vectors(&self) -> impl Iterator<Item = Bits> + Clone {
        Bits::all(self.input_width())
    }

    pub fn output_vectors(&self) -> impl Iterator<Item = Bits> + Clone {
        Bits::all(self.output_width())
    }

    /// All events, ordered by input value then output value.
    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.event_count()).map(move |i| self.event_at(i))
    }

    pub fn event_index(&self, event: &Event) -> usize {
        ((event.input.value() as usize) << self.output_width()) | event.output.value() as usize
    }

    pub fn event_at(&self, index: usize) -> Event {
        let m = self.output_width();
        Event::new(
            Bits::new((index >> m) as u32, self.input_width()),
            Bits::new((index & ((1 << m) - 1)) as u32, m),
        )
    }

    pub fn check_input(&self, x: Bits) -> Result<(), Error> {
        if x.width() != self.input_width() {
            return Err(Error::WidthMismatch {
                what: "input",
                expected: self.input_width(),
                found: x.width(),
            });
        }
        Ok(())
    }

    pub fn check_output(&self, y: Bits) -> Result<(), Error> {
        if y.width() != self.output_width() {
            return Err(Error::WidthMismatch {
                what: "output",
                expected: self.output_width(),
                found: y.width(),
            });
        }
        Ok(())
    }

    pub fn check_event(&self, event: &Event) -> Result<(), Error> {
        self.check_input(event.input)?;
        self.check_output(event.output)
    }
}

/// Finite input-output word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Event>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn push(&mut self, event: Event) {
        self.0.push(event);
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.0.pop()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Event> {
        self.0.iter()
    }

    /// The first `len` events.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `σ · e`
    pub fn extended(&self, event: Event) -> Word {
        let mut w = self.clone();
        w.push(event);
        w
    }

    /// Input projection `σ_I`.
    pub fn inputs(&self) -> Vec<Bits> {
        self.0.iter().map(|e| e.input).collect()
    }

    /// Output projection `σ_O`.
    pub fn outputs(&self) -> Vec<Bits> {
        self.0.iter().map(|e| e.output).collect()
    }
}

impl From<Vec<Event>> for Word {
    fn from(events: Vec<Event>) -> Self {
        Word(events)
    }
}

impl FromIterator<Event> for Word {
    fn from_iter<T: IntoIterator<Item = Event>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Event;
    type IntoIter = std::slice::Iter<'a, Event>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{e:?}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace-separated `x/y` events; `ε` or the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::new());
        }
        s.split_whitespace().map(str::parse).collect()
    }
}

/// Enumerates every word over `alphabet` of length at most `max_len`, shortest
/// first, and within a length in ascending event order.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let events: Vec<Event> = alphabet.events().collect();
    let mut all = vec![Word::new()];
    let mut frontier = vec![Word::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * events.len());
        for w in &frontier {
            for &e in &events {
                next.push(w.extended(e));
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// `Σ_{k=0}^{max_len} |Σ|^k`, saturating on overflow.
pub fn word_count_up_to(alphabet: &Alphabet, max_len: usize) -> u64 {
    let base = alphabet.event_count() as u64;
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(base);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_render_in_declaration_order() {
        let a_only = Bits::from_bools(&[true, false]);
        assert_eq!(a_only.to_string(), "10");
        assert_eq!(a_only.value(), 2);
        assert!(a_only.get(0));
        assert!(!a_only.get(1));
        assert_eq!("01".parse::<Bits>().unwrap(), Bits::new(1, 2));
    }

    #[test]
    fn empty_bits_render_empty() {
        let b: Bits = "".parse().unwrap();
        assert_eq!(b.width(), 0);
        assert_eq!(b.to_string(), "");
        let e: Event = "/".parse().unwrap();
        assert_eq!(e.to_string(), "/");
    }

    #[test]
    fn rejects_bad_bits() {
        assert!("10x".parse::<Bits>().is_err());
        assert!("1-".parse::<Bits>().is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(matches!(
            Alphabet::new(["A", "B"], ["A"]),
            Err(Error::DuplicateVariable(_))
        ));
        assert!(matches!(
            Alphabet::new(["A", "A"], ["R"]),
            Err(Error::DuplicateVariable(_))
        ));
        assert!(matches!(
            Alphabet::new(Vec::<String>::new(), vec!["R".to_string()]),
            Err(Error::EmptyInterface)
        ));
    }

    #[test]
    fn event_indexing_round_trips() {
        let sigma = Alphabet::new(["A", "B"], ["R"]).unwrap();
        assert_eq!(sigma.event_count(), 8);
        for (i, e) in sigma.events().enumerate() {
            assert_eq!(sigma.event_index(&e), i);
        }
        assert_eq!(sigma.event_at(5).to_string(), "10/1");
    }

    #[test]
    fn null_alphabet_has_one_event() {
        let null = Alphabet::null();
        assert_eq!(null.event_count(), 1);
        assert_eq!(null.events().next().unwrap().to_string(), "/");
    }

    #[test]
    fn word_parsing_and_prefixes() {
        let w: Word = "10/1 11/1 01/0".parse().unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(format!("{w:?}"), "(10,1)·(11,1)·(01,0)");
        assert!(w.prefix(2).is_prefix_of(&w));
        assert_eq!(w.inputs().len(), 3);
        assert_eq!(w.outputs().len(), 3);
        assert_eq!("ε".parse::<Word>().unwrap(), Word::new());
    }

    #[test]
    fn word_enumeration_counts() {
        let sigma = Alphabet::new(["A"], ["B"]).unwrap();
        let words = words_up_to(&sigma, 3);
        assert_eq!(words.len() as u64, word_count_up_to(&sigma, 3));
        assert_eq!(words.len(), 1 + 4 + 16 + 64);
    }
}
