//! Parser and canonical printer for the LaTeX coordinate notation, e.g.
//! `\frac{3}{2}+2\sqrt{2}` or `-\frac{\sqrt{2}}{2}`.
//!
//! ```text
//! value  := term | term sign term
//! term   := [sign] uint | [sign] \frac{uint}{uint}
//!         | [sign] [coeff] \sqrt{2} | [sign] \frac{[coeff]\sqrt{2}}{uint}
//! coeff  := uint | \frac{uint}{uint}
//! ```
//!
//! Whitespace is ignored everywhere. A value holds at most one rational term
//! and one radical term.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::value::{ExactValue, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct LatexError {
    /// Byte offset into the original input.
    pub position: usize,
    pub message: String,
}

const SQRT2: &str = "\\sqrt{2}";
const FRAC: &str = "\\frac{";

struct Cursor<'a> {
    /// Input with whitespace removed.
    text: String,
    /// Byte offset in `original` for each byte of `text`.
    offsets: Vec<usize>,
    pos: usize,
    original_len: usize,
    _src: &'a str,
}

enum Term {
    Rational(Rational),
    Radical(Rational),
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let mut text = String::with_capacity(src.len());
        let mut offsets = Vec::with_capacity(src.len());
        for (i, c) in src.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            for _ in 0..c.len_utf8() {
                offsets.push(i);
            }
            text.push(c);
        }
        Self {
            text,
            offsets,
            pos: 0,
            original_len: src.len(),
            _src: src,
        }
    }

    fn err(&self, message: impl Into<String>) -> LatexError {
        LatexError {
            position: self.offsets.get(self.pos).copied().unwrap_or(self.original_len),
            message: message.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), LatexError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{lit}`")))
        }
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat("+") {
            Some(false)
        } else if self.eat("-") {
            Some(true)
        } else {
            None
        }
    }

    fn uint(&mut self) -> Option<BigInt> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return None;
        }
        let v = self.rest()[..digits].parse::<BigInt>().ok()?;
        self.pos += digits;
        Some(v)
    }

    fn expect_uint(&mut self) -> Result<BigInt, LatexError> {
        self.uint().ok_or_else(|| self.err("expected an unsigned integer"))
    }

    fn denominator(&mut self) -> Result<BigInt, LatexError> {
        let at = self.pos;
        let d = self.expect_uint()?;
        if d.is_zero() {
            self.pos = at;
            return Err(self.err("zero denominator"));
        }
        Ok(d)
    }

    fn term(&mut self) -> Result<Term, LatexError> {
        let negative = self.sign().unwrap_or(false);
        let term = self.unsigned_term()?;
        Ok(match (term, negative) {
            (t, false) => t,
            (Term::Rational(r), true) => Term::Rational(-r),
            (Term::Radical(r), true) => Term::Radical(-r),
        })
    }

    fn unsigned_term(&mut self) -> Result<Term, LatexError> {
        if self.eat(SQRT2) {
            return Ok(Term::Radical(Rational::one()));
        }
        if self.eat(FRAC) {
            // \frac{\sqrt{2}}{d} | \frac{n\sqrt{2}}{d} | \frac{n}{d}[\sqrt{2}]
            let numer = if self.eat(SQRT2) {
                self.expect("}{")?;
                let d = self.denominator()?;
                self.expect("}")?;
                return Ok(Term::Radical(BigRational::new(BigInt::one(), d)));
            } else {
                self.expect_uint()?
            };
            if self.eat(SQRT2) {
                self.expect("}{")?;
                let d = self.denominator()?;
                self.expect("}")?;
                return Ok(Term::Radical(BigRational::new(numer, d)));
            }
            self.expect("}{")?;
            let d = self.denominator()?;
            self.expect("}")?;
            let q = BigRational::new(numer, d);
            if self.eat(SQRT2) {
                return Ok(Term::Radical(q));
            }
            return Ok(Term::Rational(q));
        }
        let n = self.uint().ok_or_else(|| self.err("expected a number, `\\frac` or `\\sqrt{2}`"))?;
        if self.eat(SQRT2) {
            Ok(Term::Radical(BigRational::from_integer(n)))
        } else {
            Ok(Term::Rational(BigRational::from_integer(n)))
        }
    }
}

pub fn parse_latex(s: &str) -> Result<ExactValue, LatexError> {
    let mut cur = Cursor::new(s);
    if cur.at_end() {
        return Err(cur.err("empty expression"));
    }
    let first = cur.term()?;
    let second = if cur.at_end() {
        None
    } else {
        let join_at = cur.pos;
        let negative = cur.sign().ok_or_else(|| cur.err("expected `+` or `-` between terms"))?;
        let t = cur.term()?;
        if !cur.at_end() {
            return Err(cur.err("unexpected trailing input"));
        }
        let t = match (t, negative) {
            (t, false) => t,
            (Term::Rational(r), true) => Term::Rational(-r),
            (Term::Radical(r), true) => Term::Radical(-r),
        };
        Some((join_at, t))
    };
    let mut rat = Rational::zero();
    let mut rad = Rational::zero();
    let mut seen_rat = false;
    let mut seen_rad = false;
    match first {
        Term::Rational(r) => {
            rat = r;
            seen_rat = true;
        }
        Term::Radical(r) => {
            rad = r;
            seen_rad = true;
        }
    }
    if let Some((at, t)) = second {
        let dup = match t {
            Term::Rational(r) => {
                rat = r;
                std::mem::replace(&mut seen_rat, true)
            }
            Term::Radical(r) => {
                rad = r;
                std::mem::replace(&mut seen_rad, true)
            }
        };
        if dup {
            cur.pos = at;
            return Err(cur.err("a value has at most one rational and one radical term"));
        }
    }
    Ok(ExactValue::new(rat, rad))
}

fn format_rational(r: &Rational, out: &mut String) {
    if r.is_negative() {
        out.push('-');
    }
    let n = r.numer().abs();
    if r.is_integer() {
        out.push_str(&n.to_string());
    } else {
        out.push_str(&format!("\\frac{{{}}}{{{}}}", n, r.denom()));
    }
}

fn format_radical(r: &Rational, out: &mut String) {
    if r.is_negative() {
        out.push('-');
    }
    let n = r.numer().abs();
    let coeff = if n.is_one() { String::new() } else { n.to_string() };
    if r.is_integer() {
        out.push_str(&coeff);
        out.push_str(SQRT2);
    } else {
        out.push_str(&format!("\\frac{{{coeff}{SQRT2}}}{{{}}}", r.denom()));
    }
}

/// Canonical LaTeX form: zero terms omitted, rational term first, radical
/// coefficients folded into the numerator (`\frac{3\sqrt{2}}{2}`).
pub fn format_latex(v: &ExactValue) -> String {
    let rat = v.rational_part();
    let rad = v.radical_part();
    let mut out = String::new();
    if rat.is_zero() && rad.is_zero() {
        return "0".to_owned();
    }
    if !rat.is_zero() {
        format_rational(rat, &mut out);
    }
    if !rad.is_zero() {
        if !rat.is_zero() && rad.is_positive() {
            out.push('+');
        }
        format_radical(rad, &mut out);
    }
    out
}
