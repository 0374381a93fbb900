use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MelodyError;

/// Quantified contour symbol. Variant order follows the ASCII order of the
/// printed characters, so derived `Ord` is the lexicographic order of the
/// printed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Contour {
    /// `*`, the first note of a line.
    Start,
    /// `+`
    Up,
    /// `-`
    Down,
    /// `0`
    Same,
}

impl Contour {
    pub fn from_ordering(o: Ordering) -> Contour {
        match o {
            Ordering::Greater => Contour::Up,
            Ordering::Less => Contour::Down,
            Ordering::Equal => Contour::Same,
        }
    }

    pub fn from_sign<T: Ord + Default>(v: T) -> Contour {
        Contour::from_ordering(v.cmp(&T::default()))
    }

    pub fn as_char(self) -> char {
        match self {
            Contour::Start => '*',
            Contour::Up => '+',
            Contour::Down => '-',
            Contour::Same => '0',
        }
    }

    pub fn from_char(c: char) -> Option<Contour> {
        match c {
            '*' => Some(Contour::Start),
            '+' => Some(Contour::Up),
            '-' => Some(Contour::Down),
            '0' => Some(Contour::Same),
            _ => None,
        }
    }
}

impl fmt::Display for Contour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// The three melody notations. Each has its own metric space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Notation {
    #[serde(rename = "PIT")]
    Pit,
    #[serde(rename = "IOI")]
    Ioi,
    #[serde(rename = "BTH")]
    Bth,
}

impl Notation {
    pub const ALL: [Notation; 3] = [Notation::Pit, Notation::Ioi, Notation::Bth];

    pub fn name(self) -> &'static str {
        match self {
            Notation::Pit => "PIT",
            Notation::Ioi => "IOI",
            Notation::Bth => "BTH",
        }
    }

    pub fn accepts(self, s: &Symbol) -> bool {
        matches!(
            (self, s),
            (Notation::Pit | Notation::Ioi, Symbol::Single(_)) | (Notation::Bth, Symbol::Pair(..))
        )
    }

    /// Parses a quantified token string in this notation. Whitespace is
    /// ignored, so both `* 0 + -` and `*0+-` are accepted; BTH expects
    /// `(a,b)` tuples.
    pub fn parse_symbols(self, text: &str) -> Result<Vec<Symbol>, MelodyError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match self {
            Notation::Pit | Notation::Ioi => compact
                .chars()
                .map(|c| {
                    Contour::from_char(c)
                        .map(Symbol::Single)
                        .ok_or_else(|| MelodyError::BadSymbol(c.to_string()))
                })
                .collect(),
            Notation::Bth => {
                let mut out = Vec::new();
                let chars: Vec<char> = compact.chars().collect();
                let mut i = 0;
                while i < chars.len() {
                    let tuple: String = chars[i..(i + 5).min(chars.len())].iter().collect();
                    let parsed = match chars.get(i..i + 5) {
                        Some(&['(', a, ',', b, ')']) => {
                            Contour::from_char(a).zip(Contour::from_char(b))
                        }
                        _ => None,
                    };
                    match parsed {
                        Some((a, b)) => out.push(Symbol::Pair(a, b)),
                        None => return Err(MelodyError::BadSymbol(tuple)),
                    }
                    i += 5;
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Notation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notation {
    type Err = MelodyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PIT" => Ok(Notation::Pit),
            "IOI" => Ok(Notation::Ioi),
            "BTH" => Ok(Notation::Bth),
            _ => Err(MelodyError::BadSymbol(s.to_string())),
        }
    }
}

/// One token of a quantified transcription: a contour symbol for PIT and
/// IOI, a (PIT, IOI) pair for BTH.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Single(Contour),
    Pair(Contour, Contour),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Single(c) => write!(f, "{}", c),
            Symbol::Pair(a, b) => write!(f, "({},{})", a, b),
        }
    }
}

/// Renders symbols without separators: `*0+-` or `(*,*)(0,+)`.
pub fn compact(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.to_string()).collect()
}
