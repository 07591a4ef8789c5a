use super::{Letter, NCPoly, PolyError};
use crate::matmodel::{CMatrix, MatrixTuple};

/// Substitutes `X_i ↦ x_i` and `X_i* ↦ x_i†`.
///
/// Words are visited in lexicographic order, so each new word reuses the
/// product of the prefix it shares with the previous one.
pub fn evaluate(p: &NCPoly, x: &MatrixTuple) -> Result<CMatrix, PolyError> {
    if x.len() != p.nvars() {
        return Err(PolyError::TupleArity {
            nvars: p.nvars(),
            tuple: x.len(),
        });
    }
    let n = x.dim();
    let adjoints: Vec<CMatrix> = if p.has_starred() {
        x.iter().map(|a| a.matrix().adjoint()).collect()
    } else {
        Vec::new()
    };
    let letter_matrix = |l: Letter| -> &CMatrix {
        if l.is_starred() {
            &adjoints[l.index() - 1]
        } else {
            x.get(l.index()).matrix()
        }
    };

    let mut acc = CMatrix::zeros(n, n);
    let mut prefix: Vec<CMatrix> = Vec::new();
    let mut prev: &[Letter] = &[];
    for (word, c) in p.terms() {
        let common = prev
            .iter()
            .zip(word.iter())
            .take_while(|(a, b)| a == b)
            .count();
        prefix.truncate(common);
        for k in common..word.len() {
            let m = letter_matrix(word[k]);
            let next = match prefix.last() {
                Some(left) => left * m,
                None => m.clone(),
            };
            prefix.push(next);
        }
        match prefix.last() {
            Some(prod) if !word.is_empty() => {
                let c = *c;
                acc.zip_apply(prod, |a, b| *a += b * c);
            }
            _ => {
                for k in 0..n {
                    acc[(k, k)] += *c;
                }
            }
        }
        prev = word.letters();
    }
    Ok(acc)
}

impl NCPoly {
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<CMatrix, PolyError> {
        evaluate(self, x)
    }
}
