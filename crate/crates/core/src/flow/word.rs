use std::fmt;

use serde::{Deserialize, Serialize};

/// Letter `i > 0` is the generator of request `i` (1-based); `-i` is its inverse.
pub type Letter = i32;

/// Reduced word of the free group on the request letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        assert!(l != 0, "0 is not a letter");
        Word(vec![l])
    }

    /// Reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l != 0, "0 is not a letter");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        let mut rest = other.0.as_slice();
        while let (Some(&a), Some(&b)) = (out.last(), rest.first()) {
            if a != -b {
                break;
            }
            out.pop();
            rest = &rest[1..];
        }
        out.extend_from_slice(rest);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// Strips matching first/last inverse letters; the result represents
    /// the conjugacy class.
    pub fn cyclic_reduce(&self) -> Word {
        let w = &self.0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == -w[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    /// Whether two words are conjugate, i.e. equal up to cyclic rotation
    /// after cyclic reduction.
    pub fn is_conjugate(&self, other: &Word) -> bool {
        let (a, b) = (self.cyclic_reduce(), other.cyclic_reduce());
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        (0..a.len()).any(|r| a.0[r..].iter().chain(&a.0[..r]).eq(b.0.iter()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Letter::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn reduce_word(letters: &[Letter]) -> Word {
    Word::reduce(letters.iter().copied())
}

pub fn concat(a: &Word, b: &Word) -> Word {
    a.concat(b)
}

pub fn invert(w: &Word) -> Word {
    w.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(l: &[Letter]) -> Word {
        reduce_word(l)
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(w(&[1, 2, -2, 1]).letters(), &[1, 1]);
        assert!(w(&[1, -1]).is_empty());
        assert_eq!(w(&[1, 2, -2, -1, 3]).letters(), &[3]);
    }

    #[test]
    fn concat_and_invert_examples() {
        assert!(concat(&w(&[1]), &w(&[-1])).is_empty());
        assert_eq!(invert(&w(&[1, 2])).letters(), &[-2, -1]);
        assert_eq!(concat(&w(&[1, 2, 3]), &w(&[-3, -2, 4])).letters(), &[1, 4]);
    }

    #[test]
    fn conjugacy() {
        assert_eq!(w(&[-2, 1, 2]).cyclic_reduce().letters(), &[1]);
        assert!(w(&[1, 2, 3]).is_conjugate(&w(&[3, 1, 2])));
        assert!(!w(&[1, 2]).is_conjugate(&w(&[1, 3])));
        assert!(w(&[]).is_conjugate(&w(&[4, -4])));
    }

    fn raw_word() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..16)
    }

    proptest! {
        #[test]
        fn reduction_is_confluent(base in raw_word(), inserts in prop::collection::vec((0usize..64, 1i32..=3, any::<bool>()), 0..8), order_seed in any::<u64>()) {
            let mut letters = base.clone();
            for (at, l, sign) in inserts {
                let l = if sign { l } else { -l };
                let at = at % (letters.len() + 1);
                letters.splice(at..at, [l, -l]);
            }
            // cancel adjacent pairs in a pseudo-random order until none remain
            let mut state = order_seed | 1;
            loop {
                let spots: Vec<usize> = (0..letters.len().saturating_sub(1)).filter(|&i| letters[i] == -letters[i + 1]).collect();
                if spots.is_empty() {
                    break;
                }
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let i = spots[(state % spots.len() as u64) as usize];
                letters.drain(i..i + 2);
            }
            prop_assert_eq!(Word(letters), reduce_word(&base));
        }

        #[test]
        fn group_laws(a in raw_word(), b in raw_word(), c in raw_word()) {
            let (a, b, c) = (w(&a), w(&b), w(&c));
            prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            prop_assert_eq!(a.concat(&Word::empty()), a.clone());
            prop_assert!(a.concat(&a.inverse()).is_empty());
            prop_assert_eq!(a.inverse().inverse(), a.clone());
            let mut raw = a.letters().to_vec();
            raw.extend_from_slice(b.letters());
            prop_assert_eq!(a.concat(&b), reduce_word(&raw));
        }

        #[test]
        fn conjugates_are_recognized(a in raw_word(), b in raw_word()) {
            let (a, b) = (w(&a), w(&b));
            prop_assert!(a.is_conjugate(&b.inverse().concat(&a).concat(&b)));
        }
    }
}
