use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::stomat::{IndexSet, Permutation};

/// Default bound on the number of enumerated group elements.
pub const GROUP_CAP: usize = 1_000_000;

/// Finite permutation group acting on the positions of `support`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGroup {
    pub support: IndexSet,
    pub generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    members: HashSet<Permutation>,
}

impl PermutationGroup {
    /// Closure of `generators` under composition, by breadth-first search.
    pub fn generate(support: IndexSet, generators: Vec<Permutation>, cap: usize) -> Result<Self> {
        let degree = support.len();
        if let Some(g) = generators.iter().find(|g| g.len() != degree) {
            return Err(Error::DimensionMismatch {
                expected: degree,
                found: g.len(),
            });
        }
        let identity = Permutation::identity(degree);
        let mut members = HashSet::from([identity.clone()]);
        let mut elements = vec![identity.clone()];
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.then(g);
                if members.insert(y.clone()) {
                    if members.len() > cap {
                        return Err(Error::GroupCapExceeded {
                            cap,
                            generators: generators.len(),
                        });
                    }
                    elements.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(Self {
            support,
            generators,
            elements,
            members,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.contains(p)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = PermutationGroup::generate(IndexSet::range(0, 3), vec![perm(&[0, 1, 2])], GROUP_CAP).unwrap();
        assert!(g.is_trivial());
        let empty = PermutationGroup::generate(IndexSet::empty(), vec![], GROUP_CAP).unwrap();
        assert_eq!(empty.order(), 1);
    }

    #[test]
    fn cyclic_and_klein() {
        let z3 = PermutationGroup::generate(IndexSet::range(0, 3), vec![perm(&[1, 2, 0])], GROUP_CAP).unwrap();
        assert_eq!(z3.order(), 3);
        assert!(z3.contains(&perm(&[2, 0, 1])));
        assert!(!z3.contains(&perm(&[1, 0, 2])));
        let klein = PermutationGroup::generate(
            IndexSet::range(0, 4),
            vec![perm(&[1, 0, 2, 3]), perm(&[0, 1, 3, 2])],
            GROUP_CAP,
        )
        .unwrap();
        assert_eq!(klein.order(), 4);
    }

    #[test]
    fn symmetric_group_and_cap() {
        let gens = vec![perm(&[1, 0, 2, 3, 4]), perm(&[1, 2, 3, 4, 0])];
        let s5 = PermutationGroup::generate(IndexSet::range(0, 5), gens.clone(), GROUP_CAP).unwrap();
        assert_eq!(s5.order(), 120);
        let err = PermutationGroup::generate(IndexSet::range(0, 5), gens, 50).unwrap_err();
        assert_eq!(err, Error::GroupCapExceeded { cap: 50, generators: 2 });
    }
}
