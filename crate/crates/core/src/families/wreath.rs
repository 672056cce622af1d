//! Tree automorphisms given by wreath recursions `g = σ(g_0, …, g_{d-1})`.
//!
//! A generator acts on a word `x w` by `g(x w) = σ(x) g_x(w)`. Words are
//! level-`n` vertices of the rooted `d`-ary tree.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Error in wreath-recursion text, with 1-based position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: unknown section name `{name}`")]
    UnknownSection {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: invalid permutation: {msg}")]
    InvalidPermutation {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: duplicate generator `{name}`")]
    DuplicateGenerator {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: expected {expected} sections, found {found}")]
    SectionCount {
        line: usize,
        col: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing `alphabet d` header")]
    MissingAlphabet,
    #[error("spec declares no generators")]
    NoGenerators,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Identity,
    Generator(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDef {
    pub name: String,
    /// Image of each letter under the root permutation.
    pub perm: Vec<usize>,
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathRecursionSpec {
    alphabet: usize,
    generators: Vec<GeneratorDef>,
}

/// Finite word over `{0..d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeWord(pub Vec<u8>);

impl TreeWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a digit string such as `"0120"`.
    pub fn parse(s: &str) -> Option<TreeWord> {
        s.chars()
            .map(|c| c.to_digit(36).map(|d| d as u8))
            .collect::<Option<Vec<u8>>>()
            .map(TreeWord)
    }

    /// Position in the lexicographic enumeration of all words of this length.
    pub fn index(&self, alphabet: usize) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &x| acc * alphabet + x as usize)
    }

    pub fn from_index(mut index: usize, alphabet: usize, len: usize) -> TreeWord {
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (index % alphabet) as u8;
            index /= alphabet;
        }
        TreeWord(letters)
    }

    pub fn constant(letter: u8, len: usize) -> TreeWord {
        TreeWord(vec![letter; len])
    }
}

impl fmt::Display for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            let c = char::from_digit(x as u32, 36).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl WreathRecursionSpec {
    /// Validates and assembles a spec. Sections are given by name; `"1"` and
    /// `"identity"` denote the trivial automorphism.
    pub fn new(
        alphabet: usize,
        defs: Vec<(String, Vec<usize>, Vec<String>)>,
    ) -> Result<Self, SpecError> {
        let mut lines = Vec::with_capacity(defs.len());
        for (i, (name, perm, sections)) in defs.into_iter().enumerate() {
            lines.push(RawGenerator {
                line: i + 1,
                name,
                name_col: 1,
                perm,
                perm_col: 1,
                sections: sections.into_iter().map(|s| (s, 1)).collect(),
                sections_col: 1,
            });
        }
        Self::assemble(alphabet, lines)
    }

    fn assemble(alphabet: usize, raw: Vec<RawGenerator>) -> Result<Self, SpecError> {
        if raw.is_empty() {
            return Err(SpecError::NoGenerators);
        }
        let mut index: HashMap<String, usize> = HashMap::new();
        for (i, g) in raw.iter().enumerate() {
            if is_identity_name(&g.name) || !is_identifier(&g.name) {
                return Err(SpecError::Syntax {
                    line: g.line,
                    col: g.name_col,
                    msg: format!("`{}` is not a valid generator name", g.name),
                });
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(SpecError::DuplicateGenerator {
                    line: g.line,
                    col: g.name_col,
                    name: g.name.clone(),
                });
            }
        }
        let mut generators = Vec::with_capacity(raw.len());
        for g in raw {
            validate_perm(&g.perm, alphabet).map_err(|msg| SpecError::InvalidPermutation {
                line: g.line,
                col: g.perm_col,
                msg,
            })?;
            if g.sections.len() != alphabet {
                return Err(SpecError::SectionCount {
                    line: g.line,
                    col: g.sections_col,
                    expected: alphabet,
                    found: g.sections.len(),
                });
            }
            let sections = g
                .sections
                .iter()
                .map(|(s, col)| {
                    if is_identity_name(s) {
                        Ok(Section::Identity)
                    } else {
                        index.get(s).map(|&i| Section::Generator(i)).ok_or_else(|| {
                            SpecError::UnknownSection {
                                line: g.line,
                                col: *col,
                                name: s.clone(),
                            }
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            generators.push(GeneratorDef {
                name: g.name,
                perm: g.perm,
                sections,
            });
        }
        Ok(Self {
            alphabet,
            generators,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn generators(&self) -> &[GeneratorDef] {
        &self.generators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Applies generator `gen` to `word` in place.
    pub fn act_in_place(&self, gen: usize, word: &mut [u8]) {
        let mut current = gen;
        for letter in word.iter_mut() {
            let g = &self.generators[current];
            let x = *letter as usize;
            *letter = g.perm[x] as u8;
            match g.sections[x] {
                Section::Identity => return,
                Section::Generator(next) => current = next,
            }
        }
    }

    /// Action of `gen` on all `d^level` words, as an index permutation in
    /// lexicographic word order.
    pub fn level_permutation(&self, gen: usize, level: usize) -> Vec<usize> {
        let count = self.alphabet.pow(level as u32);
        let mut buf = vec![0u8; level];
        (0..count)
            .map(|i| {
                let w = TreeWord::from_index(i, self.alphabet, level);
                buf.copy_from_slice(&w.0);
                self.act_in_place(gen, &mut buf);
                buf.iter()
                    .fold(0usize, |acc, &x| acc * self.alphabet + x as usize)
            })
            .collect()
    }

    /// Renders the spec in the text format accepted by [`parse_spec`].
    pub fn to_text(&self) -> String {
        let mut out = format!("alphabet {}\n", self.alphabet);
        for g in &self.generators {
            let sections: Vec<String> = g
                .sections
                .iter()
                .map(|s| match s {
                    Section::Identity => "1".to_string(),
                    Section::Generator(i) => self.generators[*i].name.clone(),
                })
                .collect();
            out.push_str(&format!(
                "{} = {} [{}]\n",
                g.name,
                cycle_notation(&g.perm),
                sections.join(", ")
            ));
        }
        out
    }
}

/// `act(spec, g, w)`: image of `w` under the named generator.
pub fn act(
    spec: &WreathRecursionSpec,
    generator: &str,
    word: &TreeWord,
) -> Result<TreeWord, UnknownGenerator> {
    let gen = spec
        .generator_index(generator)
        .ok_or_else(|| UnknownGenerator(generator.to_string()))?;
    let mut letters = word.0.clone();
    spec.act_in_place(gen, &mut letters);
    Ok(TreeWord(letters))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown generator `{0}`")]
pub struct UnknownGenerator(pub String);

fn is_identity_name(s: &str) -> bool {
    s == "1" || s == "identity"
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn validate_perm(perm: &[usize], alphabet: usize) -> Result<(), String> {
    if perm.len() != alphabet {
        return Err(format!("expected {alphabet} images, got {}", perm.len()));
    }
    let mut seen = vec![false; alphabet];
    for &x in perm {
        if x >= alphabet {
            return Err(format!("letter {x} out of range 0..{alphabet}"));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(format!("letter {x} appears twice"));
        }
    }
    Ok(())
}

fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        let body: Vec<String> = cycle.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("({})", body.join(" ")));
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

struct RawGenerator {
    line: usize,
    name: String,
    name_col: usize,
    perm: Vec<usize>,
    perm_col: usize,
    sections: Vec<(String, usize)>,
    sections_col: usize,
}

/// Parses the text format:
///
/// ```text
/// alphabet 3
/// a = (0 1) [1, 1, a]
/// ```
///
/// Blank lines and `#` comments are ignored. Permutations are in cycle
/// notation (`()` is the identity); section `1` is the identity.
pub fn parse_spec(text: &str) -> Result<WreathRecursionSpec, SpecError> {
    let mut alphabet = None;
    let mut raw = Vec::new();
    for (i, full_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = full_line.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(line, line_no);
        cur.skip_ws();
        if cur.at_end() {
            continue;
        }
        let (word, col) = cur.ident();
        if alphabet.is_none() {
            if word != "alphabet" {
                return Err(SpecError::MissingAlphabet);
            }
            cur.skip_ws();
            let (num, num_col) = cur.number()?;
            if !(2..=36).contains(&num) {
                return Err(SpecError::Syntax {
                    line: line_no,
                    col: num_col,
                    msg: format!("alphabet size {num} outside 2..=36"),
                });
            }
            alphabet = Some(num);
            cur.expect_end()?;
            continue;
        }
        let d = alphabet.expect("set above");
        if word.is_empty() {
            return Err(cur.error("expected generator name"));
        }
        cur.skip_ws();
        cur.expect('=')?;
        cur.skip_ws();
        let perm_col = cur.col();
        let perm = cur.permutation(d)?;
        cur.skip_ws();
        let sections_col = cur.col();
        cur.expect('[')?;
        let mut sections = Vec::new();
        loop {
            cur.skip_ws();
            let (s, scol) = cur.ident();
            if s.is_empty() {
                return Err(cur.error("expected section name"));
            }
            sections.push((s, scol));
            cur.skip_ws();
            if cur.eat(',') {
                continue;
            }
            cur.expect(']')?;
            break;
        }
        cur.expect_end()?;
        raw.push(RawGenerator {
            line: line_no,
            name: word,
            name_col: col,
            perm,
            perm_col,
            sections,
            sections_col,
        });
    }
    let alphabet = alphabet.ok_or(SpecError::MissingAlphabet)?;
    WreathRecursionSpec::assemble(alphabet, raw)
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> SpecError {
        SpecError::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expect_end(&mut self) -> Result<(), SpecError> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn ident(&mut self) -> (String, usize) {
        let col = self.col();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        (self.chars[start..self.pos].iter().collect(), col)
    }

    fn number(&mut self) -> Result<(usize, usize), SpecError> {
        let col = self.col();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map(|n| (n, col))
            .map_err(|_| self.error("expected a number"))
    }

    fn permutation(&mut self, d: usize) -> Result<Vec<usize>, SpecError> {
        let mut perm: Vec<usize> = (0..d).collect();
        let mut used = vec![false; d];
        let invalid = |line, col, msg: String| SpecError::InvalidPermutation { line, col, msg };
        if self.peek() != Some('(') {
            return Err(self.error("expected permutation in cycle notation"));
        }
        while self.eat('(') {
            let mut cycle = Vec::new();
            loop {
                self.skip_ws();
                if self.eat(')') {
                    break;
                }
                let (x, col) = self.number()?;
                if x >= d {
                    return Err(invalid(
                        self.line,
                        col,
                        format!("letter {x} out of range 0..{d}"),
                    ));
                }
                if std::mem::replace(&mut used[x], true) {
                    return Err(invalid(self.line, col, format!("letter {x} repeated")));
                }
                cycle.push(x);
                self.skip_ws();
                self.eat(',');
            }
            for (i, &x) in cycle.iter().enumerate() {
                perm[x] = cycle[(i + 1) % cycle.len()];
            }
            self.skip_ws();
        }
        Ok(perm)
    }
}
