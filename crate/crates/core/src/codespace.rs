//! Symbolic addresses, infinite codes, cylinders and the shift.
//!
//! Symbols are 1-based. Symbols `1..=m` are kept indices; `m+1..=M` mark a
//! complement set. Only kept sets are subdivided, so every symbol of an address
//! except the last is kept.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::tolerance::saturating_pow;

pub type Symbol = u16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("alphabet requires 1 < m < M (got m = {kept}, M = {total})")]
    InvalidAlphabet { kept: Symbol, total: Symbol },
    #[error("symbol {symbol} at position {position} outside 1..={max}")]
    SymbolOutOfRange {
        symbol: Symbol,
        position: usize,
        max: Symbol,
    },
    #[error("period word must be nonempty")]
    EmptyPeriod,
    #[error("enumeration of {requested} items exceeds cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("cannot parse address {0:?}")]
    Parse(String),
    #[error("address {0} is not a kept address")]
    NotKept(String),
    #[error("word must be nonempty")]
    EmptyWord,
}

/// Alphabet sizes: `kept` = m, `total` = M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    kept: Symbol,
    total: Symbol,
}

impl Alphabet {
    pub fn new(kept: Symbol, total: Symbol) -> Result<Self, CodeError> {
        if kept < 2 || kept >= total {
            return Err(CodeError::InvalidAlphabet { kept, total });
        }
        Ok(Self { kept, total })
    }

    pub fn kept(&self) -> Symbol {
        self.kept
    }

    pub fn total(&self) -> Symbol {
        self.total
    }

    fn dotted(&self) -> bool {
        self.total > 9
    }

    fn format_symbols(&self, symbols: &[Symbol]) -> String {
        let sep = if self.dotted() { "." } else { "" };
        symbols
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }

    fn check_kept(&self, symbols: &[Symbol]) -> Result<(), CodeError> {
        for (position, &symbol) in symbols.iter().enumerate() {
            if symbol == 0 || symbol > self.kept {
                return Err(CodeError::SymbolOutOfRange {
                    symbol,
                    position,
                    max: self.kept,
                });
            }
        }
        Ok(())
    }
}

/// Finite word locating a cell of the construction tree.
///
/// Ordering is lexicographic on the symbols with prefixes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    symbols: Vec<Symbol>,
    alphabet: Alphabet,
}

impl Address {
    /// The empty address, denoting the initial set.
    pub fn root(alphabet: Alphabet) -> Self {
        Self {
            symbols: Vec::new(),
            alphabet,
        }
    }

    pub fn new(symbols: Vec<Symbol>, alphabet: Alphabet) -> Result<Self, CodeError> {
        if let Some((last, interior)) = symbols.split_last() {
            alphabet.check_kept(interior)?;
            if *last == 0 || *last > alphabet.total {
                return Err(CodeError::SymbolOutOfRange {
                    symbol: *last,
                    position: symbols.len() - 1,
                    max: alphabet.total,
                });
            }
        }
        Ok(Self { symbols, alphabet })
    }

    /// Parses the textual form: plain digits when `M <= 9`, dot-separated
    /// symbols otherwise. The empty string is the root.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self, CodeError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::root(alphabet));
        }
        let bad = || CodeError::Parse(text.to_string());
        let symbols: Vec<Symbol> = if alphabet.dotted() {
            text.split('.')
                .map(|s| s.parse::<Symbol>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        Self::new(symbols, alphabet)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.symbols.last().copied()
    }

    /// True when every symbol is a kept index (the root included).
    pub fn is_kept(&self) -> bool {
        self.symbols.iter().all(|&s| s <= self.alphabet.kept)
    }

    /// True when the address names a complement set of its order.
    pub fn is_complement(&self) -> bool {
        !self.is_kept()
    }

    pub fn child(&self, symbol: Symbol) -> Result<Address, CodeError> {
        if !self.is_kept() {
            return Err(CodeError::NotKept(self.to_string()));
        }
        let mut symbols = self.symbols.clone();
        symbols.push(symbol);
        Address::new(symbols, self.alphabet)
    }

    pub fn parent(&self) -> Option<Address> {
        self.symbols.split_last().map(|(_, rest)| Address {
            symbols: rest.to_vec(),
            alphabet: self.alphabet,
        })
    }

    pub fn starts_with(&self, prefix: &Address) -> bool {
        self.symbols.starts_with(&prefix.symbols)
    }

    /// Concatenation of two kept words.
    pub fn concat(&self, other: &Address) -> Result<Address, CodeError> {
        if !self.is_kept() {
            return Err(CodeError::NotKept(self.to_string()));
        }
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Address::new(symbols, self.alphabet)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.format_symbols(&self.symbols))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All codes sharing a fixed kept prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    prefix: Address,
}

impl Cylinder {
    pub fn new(prefix: Address) -> Result<Self, CodeError> {
        if !prefix.is_kept() {
            return Err(CodeError::NotKept(prefix.to_string()));
        }
        Ok(Self { prefix })
    }

    pub fn prefix(&self) -> &Address {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CodeBody {
    /// `preperiod · period^∞`, kept in canonical form (primitive period, shortest
    /// preperiod), so structural equality is sequence equality.
    EventuallyPeriodic {
        preperiod: Vec<Symbol>,
        period: Vec<Symbol>,
    },
    /// Known prefix; `horizon` counts the shifts the prefix was declared for.
    Finite { prefix: Vec<Symbol>, horizon: usize },
}

/// An infinite kept code, either eventually periodic or a finite prefix with a
/// declared horizon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code {
    alphabet: Alphabet,
    body: CodeBody,
}

impl Code {
    pub fn eventually_periodic(
        preperiod: Vec<Symbol>,
        period: Vec<Symbol>,
        alphabet: Alphabet,
    ) -> Result<Self, CodeError> {
        if period.is_empty() {
            return Err(CodeError::EmptyPeriod);
        }
        alphabet.check_kept(&preperiod)?;
        alphabet.check_kept(&period)?;
        let (preperiod, period) = canonicalize(preperiod, period);
        Ok(Self {
            alphabet,
            body: CodeBody::EventuallyPeriodic { preperiod, period },
        })
    }

    /// A finite prefix whose first `horizon` shifts are meaningful.
    pub fn finite(prefix: Vec<Symbol>, horizon: usize, alphabet: Alphabet) -> Result<Self, CodeError> {
        alphabet.check_kept(&prefix)?;
        Ok(Self {
            alphabet,
            body: CodeBody::Finite { prefix, horizon },
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self.body, CodeBody::EventuallyPeriodic { .. })
    }

    /// `(preperiod, period)` for eventually periodic codes.
    pub fn periodic_parts(&self) -> Option<(&[Symbol], &[Symbol])> {
        match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => Some((preperiod, period)),
            CodeBody::Finite { .. } => None,
        }
    }

    /// Number of known symbols; `None` for eventually periodic codes.
    pub fn known_len(&self) -> Option<usize> {
        match &self.body {
            CodeBody::EventuallyPeriodic { .. } => None,
            CodeBody::Finite { prefix, .. } => Some(prefix.len()),
        }
    }

    pub fn horizon(&self) -> Option<usize> {
        match &self.body {
            CodeBody::EventuallyPeriodic { .. } => None,
            CodeBody::Finite { horizon, .. } => Some(*horizon),
        }
    }

    /// Symbol at 0-based position `i`, if known.
    pub fn symbol(&self, i: usize) -> Option<Symbol> {
        match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => Some(if i < preperiod.len() {
                preperiod[i]
            } else {
                period[(i - preperiod.len()) % period.len()]
            }),
            CodeBody::Finite { prefix, .. } => prefix.get(i).copied(),
        }
    }

    /// First `n` symbols, if known.
    pub fn prefix(&self, n: usize) -> Option<Vec<Symbol>> {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> Code {
        let body = match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => {
                if preperiod.is_empty() {
                    let mut period = period.clone();
                    period.rotate_left(1);
                    CodeBody::EventuallyPeriodic {
                        preperiod: Vec::new(),
                        period,
                    }
                } else {
                    CodeBody::EventuallyPeriodic {
                        preperiod: preperiod[1..].to_vec(),
                        period: period.clone(),
                    }
                }
            }
            CodeBody::Finite { prefix, horizon } => CodeBody::Finite {
                prefix: prefix.get(1..).unwrap_or_default().to_vec(),
                horizon: horizon.saturating_sub(1),
            },
        };
        Code {
            alphabet: self.alphabet,
            body,
        }
    }

    /// `shift` applied `k` times.
    pub fn shift_by(&self, k: usize) -> Code {
        match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => {
                if k <= preperiod.len() {
                    Code {
                        alphabet: self.alphabet,
                        body: CodeBody::EventuallyPeriodic {
                            preperiod: preperiod[k..].to_vec(),
                            period: period.clone(),
                        },
                    }
                } else {
                    let mut period = period.clone();
                    let r = (k - preperiod.len()) % period.len();
                    period.rotate_left(r);
                    Code {
                        alphabet: self.alphabet,
                        body: CodeBody::EventuallyPeriodic {
                            preperiod: Vec::new(),
                            period,
                        },
                    }
                }
            }
            CodeBody::Finite { prefix, horizon } => Code {
                alphabet: self.alphabet,
                body: CodeBody::Finite {
                    prefix: prefix.get(k..).unwrap_or_default().to_vec(),
                    horizon: horizon.saturating_sub(k),
                },
            },
        }
    }

    /// True iff the code begins with the cylinder's prefix. A finite code too
    /// short to decide is reported as not a member.
    pub fn in_cylinder(&self, cylinder: &Cylinder) -> bool {
        cylinder
            .prefix()
            .symbols()
            .iter()
            .enumerate()
            .all(|(i, &s)| self.symbol(i) == Some(s))
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => write!(
                f,
                "{}({})^inf",
                self.alphabet.format_symbols(preperiod),
                self.alphabet.format_symbols(period)
            ),
            CodeBody::Finite { prefix, .. } => {
                write!(f, "{}...", self.alphabet.format_symbols(prefix))
            }
        }
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.body {
            CodeBody::EventuallyPeriodic { preperiod, period } => {
                let mut st = serializer.serialize_struct("Code", 2)?;
                st.serialize_field("preperiod", &self.alphabet.format_symbols(preperiod))?;
                st.serialize_field("period", &self.alphabet.format_symbols(period))?;
                st.end()
            }
            CodeBody::Finite { prefix, horizon } => {
                let mut st = serializer.serialize_struct("Code", 2)?;
                st.serialize_field("prefix", &self.alphabet.format_symbols(prefix))?;
                st.serialize_field("horizon", horizon)?;
                st.end()
            }
        }
    }
}

fn canonicalize(mut preperiod: Vec<Symbol>, mut period: Vec<Symbol>) -> (Vec<Symbol>, Vec<Symbol>) {
    let n = period.len();
    if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d])) {
        period.truncate(d);
    }
    while let (Some(&a), Some(&b)) = (preperiod.last(), period.last()) {
        if a != b {
            break;
        }
        preperiod.pop();
        period.rotate_right(1);
    }
    (preperiod, period)
}

/// The purely periodic code `w^∞`.
pub fn periodic_code(word: &Address) -> Result<Code, CodeError> {
    if word.is_empty() {
        return Err(CodeError::EmptyWord);
    }
    Code::eventually_periodic(Vec::new(), word.symbols().to_vec(), word.alphabet())
}

/// All `m^n` kept words of length `n`, in lexicographic order.
pub fn enumerate_words(alphabet: Alphabet, n: usize, cap: u64) -> Result<Vec<Address>, CodeError> {
    let m = alphabet.kept();
    let count = saturating_pow(m as u64, n);
    if count > cap {
        return Err(CodeError::CapExceeded {
            requested: count,
            cap,
        });
    }
    let mut words = Vec::with_capacity(count as usize);
    let mut current = vec![1 as Symbol; n];
    loop {
        words.push(Address {
            symbols: current.clone(),
            alphabet,
        });
        // Odometer increment from the last position.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(words);
            }
            i -= 1;
            if current[i] < m {
                current[i] += 1;
                break;
            }
            current[i] = 1;
        }
    }
}

/// Number of symbols in the concatenation of all kept words of lengths `1..=n`.
pub fn transitive_prefix_len(m: Symbol, n: usize) -> u64 {
    (1..=n).fold(0u64, |acc, k| {
        acc.saturating_add(saturating_pow(m as u64, k).saturating_mul(k as u64))
    })
}

/// Concatenation of all kept words of lengths `1..=n` in lexicographic order.
///
/// Every kept word of length at most `n` occurs in it at some offset, so the
/// shift orbit of any code extending it enters every cylinder of depth `<= n`.
pub fn transitive_prefix(alphabet: Alphabet, n: usize, cap: u64) -> Result<Address, CodeError> {
    if n == 0 {
        return Err(CodeError::EmptyWord);
    }
    let total = transitive_prefix_len(alphabet.kept(), n);
    if total > cap {
        return Err(CodeError::CapExceeded {
            requested: total,
            cap,
        });
    }
    let mut symbols = Vec::with_capacity(total as usize);
    for k in 1..=n {
        for w in enumerate_words(alphabet, k, cap)? {
            symbols.extend_from_slice(w.symbols());
        }
    }
    Ok(Address { symbols, alphabet })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(m: Symbol, total: Symbol) -> Alphabet {
        Alphabet::new(m, total).unwrap()
    }

    fn word(s: &str, a: Alphabet) -> Address {
        Address::parse(s, a).unwrap()
    }

    fn ep(pre: &[Symbol], per: &[Symbol]) -> Code {
        Code::eventually_periodic(pre.to_vec(), per.to_vec(), ab(2, 3)).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(ep(&[], &[1, 2]).shift(), ep(&[], &[2, 1]));
        assert_eq!(ep(&[], &[1]).shift(), ep(&[], &[1]));
        assert_eq!(ep(&[2], &[1]).shift(), ep(&[], &[1]));
    }

    #[test]
    fn canonical_form_equates_equal_sequences() {
        assert_eq!(ep(&[], &[1, 2, 1, 2]), ep(&[], &[1, 2]));
        assert_eq!(ep(&[1, 2], &[1, 2]), ep(&[], &[1, 2]));
        assert_eq!(ep(&[2, 1], &[2, 1]), ep(&[], &[2, 1]));
        assert_ne!(ep(&[2], &[1]), ep(&[], &[1]));
    }

    #[test]
    fn cylinder_membership() {
        let a = ab(2, 3);
        let cyl = |s: &str| Cylinder::new(word(s, a)).unwrap();
        assert!(ep(&[], &[1, 2]).in_cylinder(&cyl("12")));
        assert!(!ep(&[], &[1, 2]).in_cylinder(&cyl("2")));
        assert!(ep(&[2], &[1]).in_cylinder(&cyl("21")));
        assert!(Cylinder::new(word("3", a)).is_err());
    }

    #[test]
    fn word_enumeration() {
        let a = ab(2, 3);
        let words: Vec<String> = enumerate_words(a, 2, 1_000_000)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(words, ["11", "12", "21", "22"]);
        let empty = enumerate_words(a, 0, 1_000_000).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].is_empty());

        let carpet = enumerate_words(ab(8, 9), 3, 1_000_000).unwrap();
        assert_eq!(carpet.len(), 512);
        assert_eq!(carpet[0].to_string(), "111");
        assert_eq!(carpet[511].to_string(), "888");

        assert!(matches!(
            enumerate_words(ab(8, 9), 7, 1_000_000),
            Err(CodeError::CapExceeded { requested: 2_097_152, .. })
        ));
    }

    #[test]
    fn periodic_codes() {
        let a = ab(2, 3);
        assert_eq!(periodic_code(&word("12", a)).unwrap(), ep(&[], &[1, 2]));
        assert_eq!(periodic_code(&word("1", a)).unwrap(), ep(&[], &[1]));
        let w = word("1121", a);
        let c = periodic_code(&w).unwrap();
        assert_eq!(c.shift_by(w.len()), c);
        assert!(periodic_code(&Address::root(a)).is_err());
    }

    #[test]
    fn transitive_prefix_small_cases() {
        let a = ab(2, 3);
        assert_eq!(transitive_prefix(a, 1, 1_000_000).unwrap().to_string(), "12");
        assert_eq!(transitive_prefix(a, 2, 1_000_000).unwrap().to_string(), "1211122122");
        // 2 + 4·2 + 8·3 + 16·4 + 32·5 + 64·6 + 128·7 + 256·8
        assert_eq!(transitive_prefix_len(2, 8), 3586);
        assert_eq!(transitive_prefix(a, 8, 1_000_000).unwrap().len(), 3586);
    }

    #[test]
    fn address_text_forms() {
        let small = ab(8, 9);
        let w = word("1211", small);
        assert_eq!(w.symbols(), &[1, 2, 1, 1]);
        assert_eq!(w.to_string(), "1211");

        let big = ab(12, 13);
        let w = word("1.12.3", big);
        assert_eq!(w.symbols(), &[1, 12, 3]);
        assert_eq!(w.to_string(), "1.12.3");
        assert_eq!(word("12", big).symbols(), &[12]);
    }

    #[test]
    fn address_invariants() {
        let a = ab(8, 9);
        assert!(Address::new(vec![9], a).unwrap().is_complement());
        assert!(matches!(
            Address::new(vec![9, 1], a),
            Err(CodeError::SymbolOutOfRange { symbol: 9, position: 0, .. })
        ));
        assert!(Address::new(vec![10], a).is_err());
        assert!(Address::new(vec![0], a).is_err());
        assert!(word("19", a).child(1).is_err());
        assert_eq!(word("12", a).parent().unwrap().to_string(), "1");
    }

    #[test]
    fn finite_codes_shift_their_horizon() {
        let a = ab(2, 3);
        let c = Code::finite(vec![1, 2, 2, 1], 2, a).unwrap();
        let s = c.shift();
        assert_eq!(s.symbol(0), Some(2));
        assert_eq!(s.horizon(), Some(1));
        assert_eq!(s.known_len(), Some(3));
        assert_eq!(c.symbol(4), None);
    }
}
