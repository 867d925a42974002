//! Reduced words in the free group on two generators `p` (parabolic) and `h`
//! (hyperbolic), plus finite-depth boundary codes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    P,
    H,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::P => Letter::H,
            Letter::H => Letter::P,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::P => write!(f, "p"),
            Letter::H => write!(f, "h"),
        }
    }
}

/// One syllable `letter^exponent`, exponent nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub letter: Letter,
    pub exponent: i64,
}

/// A reduced word: adjacent syllables use distinct letters, exponents are
/// nonzero. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Single-syllable word; identity when `exponent == 0`.
    pub fn syllable(letter: Letter, exponent: i64) -> Self {
        if exponent == 0 {
            Word::identity()
        } else {
            Word {
                syllables: vec![Syllable { letter, exponent }],
            }
        }
    }

    /// Build from raw syllables, reducing adjacent repetitions and dropping
    /// zero exponents.
    pub fn from_syllables<I: IntoIterator<Item = (Letter, i64)>>(iter: I) -> Self {
        let mut w = Word::identity();
        for (letter, exponent) in iter {
            w = w.mul(&Word::syllable(letter, exponent));
        }
        w
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Syllable count (the word length `k`).
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.syllables.first().map(|s| s.letter)
    }

    pub fn last_letter(&self) -> Option<Letter> {
        self.syllables.last().map(|s| s.letter)
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    letter: s.letter,
                    exponent: -s.exponent,
                })
                .collect(),
        }
    }

    /// Reduced product, together with the number of right-hand syllables that
    /// cancelled away entirely at the seam.
    pub fn mul_track(&self, rhs: &Word) -> (Word, usize) {
        let a = &self.syllables;
        let b = &rhs.syllables;
        let mut i = a.len();
        let mut j = 0usize;
        let mut merged: Option<Syllable> = None;
        while i > 0 && j < b.len() {
            let sa = a[i - 1];
            let sb = b[j];
            if sa.letter != sb.letter {
                break;
            }
            let e = sa.exponent + sb.exponent;
            if e == 0 {
                i -= 1;
                j += 1;
            } else {
                merged = Some(Syllable {
                    letter: sa.letter,
                    exponent: e,
                });
                i -= 1;
                j += 1;
                break;
            }
        }
        let mut out = Vec::with_capacity(i + b.len() - j + 1);
        out.extend_from_slice(&a[..i]);
        let consumed = if let Some(m) = merged {
            out.push(m);
            j - 1
        } else {
            j
        };
        out.extend_from_slice(&b[j..]);
        (Word { syllables: out }, consumed)
    }

    pub fn mul(&self, rhs: &Word) -> Word {
        self.mul_track(rhs).0
    }

    /// First `depth` syllables.
    pub fn truncate(&self, depth: usize) -> Word {
        Word {
            syllables: self.syllables[..depth.min(self.len())].to_vec(),
        }
    }

    /// Extend to `depth` syllables with the canonical tail: alternate letters,
    /// exponent +1.
    pub fn extend_canonical(&self, depth: usize) -> Word {
        let mut s = self.syllables.clone();
        while s.len() < depth {
            let letter = s.last().map(|x| x.letter.other()).unwrap_or(Letter::P);
            s.push(Syllable {
                letter,
                exponent: 1,
            });
        }
        Word { syllables: s }
    }

    /// Parse the whitespace-separated literal syntax, e.g. `p^2 h^-3 p^1`.
    /// Bare letters mean exponent 1. The result is reduced.
    pub fn parse(text: &str) -> Result<Word> {
        let mut syllables = Vec::new();
        for tok in text.split_whitespace() {
            let (letter_str, exp_str) = match tok.split_once('^') {
                Some((l, e)) => (l, Some(e)),
                None => (tok, None),
            };
            let letter = match letter_str {
                "p" | "P" => Letter::P,
                "h" | "H" => Letter::H,
                other => {
                    return Err(Error::WordSyntax(format!(
                        "unknown generator {other:?} in token {tok:?}"
                    )))
                }
            };
            let exponent = match exp_str {
                None => 1,
                Some(e) => e.parse::<i64>().map_err(|_| {
                    Error::WordSyntax(format!("bad exponent {e:?} in token {tok:?}"))
                })?,
            };
            syllables.push((letter, exponent));
        }
        Ok(Word::from_syllables(syllables))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for s in &self.syllables {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}^{}", s.letter, s.exponent)?;
            first = false;
        }
        Ok(())
    }
}

/// A boundary point coded by a finite reduced word (truncation of an infinite
/// code). Its ping-pong cell is determined by the first letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    code: Word,
}

impl BoundaryPoint {
    pub fn new(code: Word) -> Result<Self> {
        if code.is_empty() {
            return Err(Error::WordSyntax(
                "boundary code must have depth >= 1".into(),
            ));
        }
        Ok(BoundaryPoint { code })
    }

    pub fn code(&self) -> &Word {
        &self.code
    }

    pub fn depth(&self) -> usize {
        self.code.len()
    }

    /// Ping-pong cell of the point.
    pub fn cell(&self) -> Letter {
        self.code.first_letter().expect("depth >= 1")
    }

    /// Code truncated or canonically extended to exactly `depth` syllables.
    pub fn code_at_depth(&self, depth: usize) -> Word {
        if depth <= self.depth() {
            self.code.truncate(depth)
        } else {
            self.code.extend_canonical(depth)
        }
    }

    /// The point `g . x`, coded by the reduced product. Errors if the code is
    /// cancelled entirely.
    pub fn apply(&self, g: &Word) -> Result<BoundaryPoint> {
        let (code, consumed) = g.mul_track(&self.code);
        if consumed == self.code.len() || code.is_empty() {
            return Err(Error::DepthError);
        }
        Ok(BoundaryPoint { code })
    }

    /// Parse `<word> @<depth>`; the code is extended canonically (or
    /// truncated) to the requested depth when given.
    pub fn parse(text: &str) -> Result<BoundaryPoint> {
        let (word_part, depth) = match text.split_once('@') {
            None => (text, None),
            Some((w, d)) => {
                let depth: usize = d.trim().parse().map_err(|_| {
                    Error::WordSyntax(format!("bad depth {d:?} in boundary point"))
                })?;
                (w, Some(depth))
            }
        };
        let word = Word::parse(word_part)?;
        let word = match depth {
            Some(0) => {
                return Err(Error::WordSyntax("boundary depth must be >= 1".into()))
            }
            Some(d) => {
                if d <= word.len() {
                    word.truncate(d)
                } else {
                    word.extend_canonical(d)
                }
            }
            None => word,
        };
        BoundaryPoint::new(word)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{}", self.code, self.depth())
    }
}
