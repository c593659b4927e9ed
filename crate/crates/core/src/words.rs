//! Reduced words in free groups.
//!
//! A [`Word`] is always freely reduced: every constructor cancels adjacent
//! inverse pairs eagerly, so equality of words is equality of group elements.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet mismatch: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },
    #[error("generator index {index} out of range for alphabet of size {size}")]
    GeneratorOutOfRange { index: usize, size: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("no image given for generator `{0}`")]
    MissingImage(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("word is not cyclically reduced: {0}")]
    NotCyclicallyReduced(String),
}

/// A finite set of named free generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Names must be nonempty, pairwise distinct and prefix-free, must not
    /// start with a digit and must not contain `^`, `-`, `,` or whitespace.
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::InvalidAlphabet("no generators".into()));
        }
        for n in &names {
            let bad_start = n.chars().next().is_none_or(|c| c.is_ascii_digit());
            if bad_start || n.chars().any(|c| c.is_whitespace() || "^-,()".contains(c)) {
                return Err(WordError::InvalidAlphabet(format!("bad generator name `{n}`")));
            }
        }
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                if a.starts_with(b.as_str()) || b.starts_with(a.as_str()) {
                    return Err(WordError::InvalidAlphabet(format!(
                        "generator names `{a}` and `{b}` are ambiguous"
                    )));
                }
            }
        }
        Ok(Arc::new(Alphabet { names }))
    }

    /// The two-letter alphabet `{x, y}`.
    pub fn xy() -> Arc<Self> {
        Self::new(["x", "y"]).expect("static alphabet")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn describe(&self) -> String {
        self.names.join(",")
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn pos(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn neg(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// Options for the textual word syntax.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Syntax {
    /// Treat the uppercase form of a single-character lowercase generator
    /// as its inverse (`X` = `x^-1`).
    pub uppercase_inverse: bool,
}

/// A freely reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inv()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

impl Word {
    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Word { alphabet: Arc::clone(alphabet), letters: Vec::new() }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I>(alphabet: &Arc<Alphabet>, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut stack = Vec::new();
        for l in letters {
            if l.generator >= alphabet.size() {
                return Err(WordError::GeneratorOutOfRange {
                    index: l.generator,
                    size: alphabet.size(),
                });
            }
            push_reduced(&mut stack, l);
        }
        Ok(Word { alphabet: Arc::clone(alphabet), letters: stack })
    }

    pub fn generator(alphabet: &Arc<Alphabet>, generator: usize) -> Result<Self, WordError> {
        Self::from_letters(alphabet, [Letter::pos(generator)])
    }

    /// Product of powers `g_i^{e_i}` in order.
    pub fn from_powers(alphabet: &Arc<Alphabet>, powers: &[(usize, i64)]) -> Result<Self, WordError> {
        let letters = powers.iter().flat_map(|&(g, e)| {
            let l = Letter::new(g, e < 0);
            std::iter::repeat_n(l, e.unsigned_abs() as usize)
        });
        Self::from_letters(alphabet, letters)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_alphabet(&self, other: &Word) -> Result<(), WordError> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch {
                left: self.alphabet.describe(),
                right: other.alphabet.describe(),
            })
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: Arc::clone(&self.alphabet),
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.same_alphabet(other)?;
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word { alphabet: Arc::clone(&self.alphabet), letters })
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * exponent.unsigned_abs() as usize);
        for _ in 0..exponent.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut letters, l);
            }
        }
        Word { alphabet: Arc::clone(&self.alphabet), letters }
    }

    /// `g⁻¹ · self · g`, written `self^g`.
    pub fn conjugate(&self, g: &Word) -> Result<Word, WordError> {
        g.inverse().multiply(self)?.multiply(g)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != b.inv(),
            _ => true,
        }
    }

    /// Returns `(core, conjugator)` with `core` cyclically reduced and
    /// `self == core.conjugate(&conjugator)`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inv() {
            k += 1;
        }
        let core = Word {
            alphabet: Arc::clone(&self.alphabet),
            letters: self.letters[k..n - k].to_vec(),
        };
        let prefix = Word {
            alphabet: Arc::clone(&self.alphabet),
            letters: self.letters[..k].to_vec(),
        };
        (core, prefix.inverse())
    }

    pub fn substitute(&self, sub: &Substitution) -> Result<Word, WordError> {
        sub.apply(self)
    }

    /// Reads `x`, `x^-1`, `x^4`, products by juxtaposition; `1` or the empty
    /// string is the identity.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Word, WordError> {
        Self::parse_with(alphabet, text, Syntax::default())
    }

    pub fn parse_with(alphabet: &Arc<Alphabet>, text: &str, syntax: Syntax) -> Result<Word, WordError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut letters = Vec::new();
        let err = |pos: usize, msg: &str| WordError::Parse { pos, msg: msg.to_string() };
        while pos < bytes.len() {
            let c = bytes[pos];
            if c.is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if c == b'1' && letters.is_empty() && text[pos + 1..].trim().is_empty() {
                pos += 1;
                continue;
            }
            let rest = &text[pos..];
            let mut matched = alphabet
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len())
                .map(|(i, n)| (i, n.len(), false));
            if matched.is_none() && syntax.uppercase_inverse {
                let ch = rest.chars().next().unwrap();
                if ch.is_uppercase() {
                    let lower: String = ch.to_lowercase().collect();
                    if let Some(i) = alphabet.index_of(&lower) {
                        matched = Some((i, ch.len_utf8(), true));
                    }
                }
            }
            let (generator, len, inverted) = matched.ok_or_else(|| err(pos, "unknown generator"))?;
            pos += len;
            let mut exponent: i64 = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let start = pos;
                if pos < bytes.len() && bytes[pos] == b'-' {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exponent = text[start..pos]
                    .parse()
                    .map_err(|_| err(start, "expected integer exponent"))?;
            }
            if inverted {
                exponent = -exponent;
            }
            let l = Letter::new(generator, exponent < 0);
            for _ in 0..exponent.unsigned_abs() {
                letters.push(l);
            }
        }
        Self::from_letters(alphabet, letters)
    }

    /// Comma-separated list of words, as used for subgroup generators.
    pub fn parse_list(alphabet: &Arc<Alphabet>, text: &str) -> Result<Vec<Word>, WordError> {
        text.split(',').map(|s| Word::parse(alphabet, s)).collect()
    }

    pub fn to_string_with(&self, syntax: Syntax) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            let name = self.alphabet.name(l.generator);
            let single_char = name.chars().count() == 1 && name.chars().all(|c| c.is_lowercase());
            if syntax.uppercase_inverse && l.inverse && single_char {
                out.push_str(&name.to_uppercase());
                if run > 1 {
                    out.push_str(&format!("^{run}"));
                }
            } else {
                out.push_str(name);
                match (l.inverse, run) {
                    (false, 1) => {}
                    (false, r) => out.push_str(&format!("^{r}")),
                    (true, r) => out.push_str(&format!("^-{r}")),
                }
            }
            i += run;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(Syntax::default()))
    }
}

/// `x^{b}y^{b}x^{b}` with `b = base · 2ⁿ`, over the first two generators.
pub fn power_word_in(alphabet: &Arc<Alphabet>, n: u32, base: u64) -> Result<Word, WordError> {
    if alphabet.size() < 2 {
        return Err(WordError::InvalidAlphabet("need at least two generators".into()));
    }
    let b = (base << n) as i64;
    Word::from_powers(alphabet, &[(0, b), (1, b), (0, b)])
}

/// [`power_word_in`] over `{x, y}`.
pub fn power_word(n: u32, base: u64) -> Word {
    power_word_in(&Alphabet::xy(), n, base).expect("xy has two generators")
}

/// A homomorphism between free groups given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    images: Vec<Word>,
}

impl Substitution {
    pub fn new(
        source: &Arc<Alphabet>,
        target: &Arc<Alphabet>,
        images: &BTreeMap<usize, Word>,
    ) -> Result<Self, WordError> {
        let mut out = Vec::with_capacity(source.size());
        for g in 0..source.size() {
            let img = images
                .get(&g)
                .ok_or_else(|| WordError::MissingImage(source.name(g).to_string()))?;
            if img.alphabet.as_ref() != target.as_ref() {
                return Err(WordError::AlphabetMismatch {
                    left: img.alphabet.describe(),
                    right: target.describe(),
                });
            }
            out.push(img.clone());
        }
        Ok(Substitution { source: Arc::clone(source), target: Arc::clone(target), images: out })
    }

    /// Images listed in generator order.
    pub fn from_images(source: &Arc<Alphabet>, target: &Arc<Alphabet>, images: Vec<Word>) -> Result<Self, WordError> {
        let map = images.into_iter().enumerate().collect();
        Self::new(source, target, &map)
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        if w.alphabet.as_ref() != self.source.as_ref() {
            return Err(WordError::AlphabetMismatch {
                left: w.alphabet.describe(),
                right: self.source.describe(),
            });
        }
        let mut letters = Vec::new();
        for l in &w.letters {
            let img = &self.images[l.generator];
            if l.inverse {
                for &m in img.letters.iter().rev() {
                    push_reduced(&mut letters, m.inv());
                }
            } else {
                for &m in &img.letters {
                    push_reduced(&mut letters, m);
                }
            }
        }
        Ok(Word { alphabet: Arc::clone(&self.target), letters })
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Substitution) -> Result<Substitution, WordError> {
        let images = self.images.iter().map(|w| other.apply(w)).collect::<Result<Vec<_>, _>>()?;
        Ok(Substitution {
            source: Arc::clone(&self.source),
            target: Arc::clone(&other.target),
            images,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(&Alphabet::xy(), s).unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert!(w("x").multiply(&w("x^-1")).unwrap().is_empty());
        assert_eq!(w("xy").multiply(&w("y^-1x")).unwrap(), w("x^2"));
        // brute force: concatenate letters and reduce with a fresh stack
        let a = w("x^2y^2");
        let b = w("y^2x^2");
        let mut raw: Vec<Letter> = a.letters().to_vec();
        raw.extend_from_slice(b.letters());
        let expected = Word::from_letters(&Alphabet::xy(), raw).unwrap();
        assert_eq!(a.multiply(&b).unwrap(), expected);
        assert_eq!(expected.to_string(), "x^2y^4x^2");
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let other = Alphabet::new(["X", "Y"]).unwrap();
        let a = Word::generator(&other, 0).unwrap();
        assert!(matches!(w("x").multiply(&a), Err(WordError::AlphabetMismatch { .. })));
        assert!(w("x").conjugate(&a).is_err());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(w("x").conjugate(&w("1")).unwrap(), w("x"));
        assert_eq!(w("xyx").conjugate(&w("y")).unwrap(), w("y^-1xyxy"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("x^-1yx").cyclic_reduce(), (w("y"), w("x")));
        assert_eq!(w("xyx").cyclic_reduce(), (w("xyx"), w("1")));
        assert_eq!(w("1").cyclic_reduce(), (w("1"), w("1")));
        assert!(w("x").is_cyclically_reduced());
        assert!(!w("xyx^-1").is_cyclically_reduced());
    }

    #[test]
    fn substitute_examples() {
        let big = Alphabet::new(["X", "Y"]).unwrap();
        let xy = Alphabet::xy();
        let sub = Substitution::from_images(&big, &xy, vec![w("x^4"), w("y^4")]).unwrap();
        let p = |s: &str| Word::parse(&big, s).unwrap();
        assert_eq!(sub.apply(&p("XY")).unwrap(), w("x^4y^4"));
        assert_eq!(sub.apply(&p("X^-1")).unwrap(), w("x^-4"));
        assert_eq!(sub.apply(&p("XYX")).unwrap(), w("x^4y^4x^4"));
    }

    #[test]
    fn missing_image() {
        let big = Alphabet::new(["X", "Y"]).unwrap();
        let mut m = BTreeMap::new();
        m.insert(0, w("x"));
        assert_eq!(
            Substitution::new(&big, &Alphabet::xy(), &m).unwrap_err(),
            WordError::MissingImage("Y".into())
        );
    }

    #[test]
    fn power_word_examples() {
        assert_eq!(power_word(0, 1), w("xyx"));
        assert_eq!(power_word(1, 1), w("x^2y^2x^2"));
        assert_eq!(power_word(2, 1), w("x^4y^4x^4"));
        assert_eq!(power_word(10, 1).len(), 3 * 1024);
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("x^2 y^-3 x").to_string(), "x^2y^-3x");
        assert_eq!(w("").to_string(), "1");
        assert_eq!(w("x^0"), w("1"));
        let up = Syntax { uppercase_inverse: true };
        let v = Word::parse_with(&Alphabet::xy(), "xYYx", up).unwrap();
        assert_eq!(v, w("xy^-2x"));
        assert_eq!(v.to_string_with(up), "xY^2x");
        assert!(matches!(Word::parse(&Alphabet::xy(), "xz"), Err(WordError::Parse { pos: 1, .. })));
        assert!(Word::parse(&Alphabet::xy(), "x^").is_err());
        assert_eq!(Word::parse_list(&Alphabet::xy(), "x^2, y^2").unwrap(), vec![w("x^2"), w("y^2")]);
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["x", "x"]).is_err());
        assert!(Alphabet::new(["a", "ab"]).is_err());
        assert!(Alphabet::new(["1a"]).is_err());
        assert!(Alphabet::new(["a1", "b1"]).is_ok());
    }
}
