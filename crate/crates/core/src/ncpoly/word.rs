use std::fmt;
use std::ops::Deref;

/// One indeterminate `X_i` or its formal adjoint `X_i*`. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    index: u32,
    starred: bool,
}

impl Letter {
    /// `X_index`. Panics if `index == 0`.
    pub fn x(index: usize) -> Self {
        Self::new(index, false)
    }

    /// `X_index*`. Panics if `index == 0`.
    pub fn x_star(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn new(index: usize, starred: bool) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        let index = u32::try_from(index).expect("variable index fits in u32");
        Letter { index, starred }
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_starred(self) -> bool {
        self.starred
    }

    /// The adjoint letter: `X_i <-> X_i*`.
    pub fn toggled(self) -> Self {
        Letter {
            index: self.index,
            starred: !self.starred,
        }
    }

    pub fn unstarred(self) -> Self {
        Letter {
            index: self.index,
            starred: false,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.starred {
            write!(f, "X{}*", self.index)
        } else {
            write!(f, "X{}", self.index)
        }
    }
}

/// A monomial: an ordered product of letters. The empty word is the unit.
///
/// Words compare lexicographically, which fixes the term order of every
/// polynomial map.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Word in unstarred letters given by 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        Word(indices.iter().map(|&i| Letter::x(i)).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Reversed word with every letter starred/unstarred.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.toggled()).collect())
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn has_starred(&self) -> bool {
        self.0.iter().any(|l| l.starred)
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    /// All factorizations `self = Q · X_i · R`, as `(Q, R)` pairs in order of
    /// the position of the split letter.
    pub fn splittings(&self, letter: Letter) -> impl Iterator<Item = (Word, Word)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == letter)
            .map(move |(pos, _)| (Word(self.0[..pos].to_vec()), Word(self.0[pos + 1..].to_vec())))
    }

    /// Every word of exactly `degree` unstarred letters in `nvars` variables,
    /// in lexicographic order.
    pub fn all_of_degree(nvars: usize, degree: usize) -> Vec<Word> {
        let mut out = vec![Word::unit()];
        for _ in 0..degree {
            out = out
                .iter()
                .flat_map(|w| {
                    (1..=nvars).map(move |i| {
                        let mut letters = w.0.clone();
                        letters.push(Letter::x(i));
                        Word(letters)
                    })
                })
                .collect();
        }
        out
    }
}

impl Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut k = 0;
        while k < self.0.len() {
            let letter = self.0[k];
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == letter {
                run += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{letter}")?;
            } else {
                write!(f, "{letter}^{run}")?;
            }
            k += run;
        }
        Ok(())
    }
}
