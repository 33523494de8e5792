//! Immutable lists with insert/delete primitives and the interval,
//! prefix and head/tail helpers the tree operations are built from.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("position {pos} out of range for list of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
}

/// A finite ordered sequence of items. Every operation returns a new list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ListDoc<T>(Vec<T>);

impl<T> ListDoc<T> {
    pub fn new() -> Self {
        ListDoc(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&T> {
        self.0.get(n)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }
}

impl<T> From<Vec<T>> for ListDoc<T> {
    fn from(v: Vec<T>) -> Self {
        ListDoc(v)
    }
}

impl<T> FromIterator<T> for ListDoc<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        ListDoc(iter.into_iter().collect())
    }
}

impl<T> std::ops::Index<usize> for ListDoc<T> {
    type Output = T;

    fn index(&self, n: usize) -> &T {
        &self.0[n]
    }
}

impl<'a, T> IntoIterator for &'a ListDoc<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `L[<k] + [item] + L[>=k]`. Requires `k <= |L|`.
pub fn insert_l<T: Clone>(item: T, k: usize, list: &ListDoc<T>) -> Result<ListDoc<T>, ListError> {
    Ok(ListDoc(insert_slice(item, k, &list.0)?))
}

/// `L[<k] + L[>k]`. Requires `k < |L|`.
pub fn delete_l<T: Clone>(k: usize, list: &ListDoc<T>) -> Result<ListDoc<T>, ListError> {
    Ok(ListDoc(delete_slice(k, &list.0)?))
}

pub(crate) fn insert_slice<T: Clone>(item: T, k: usize, items: &[T]) -> Result<Vec<T>, ListError> {
    if k > items.len() {
        return Err(ListError::PositionOutOfRange { pos: k, len: items.len() });
    }
    let mut out = Vec::with_capacity(items.len() + 1);
    out.extend_from_slice(&items[..k]);
    out.push(item);
    out.extend_from_slice(&items[k..]);
    Ok(out)
}

pub(crate) fn delete_slice<T: Clone>(k: usize, items: &[T]) -> Result<Vec<T>, ListError> {
    if k >= items.len() {
        return Err(ListError::PositionOutOfRange { pos: k, len: items.len() });
    }
    let mut out = Vec::with_capacity(items.len() - 1);
    out.extend_from_slice(&items[..k]);
    out.extend_from_slice(&items[k + 1..]);
    Ok(out)
}

/// The interval `L[x, y]`, both ends inclusive.
///
/// Never fails: the result is empty when `x > y` or `x` is past the end,
/// and runs to the last element when only `y` is past the end.
pub fn slice<T: Clone>(list: &ListDoc<T>, x: usize, y: usize) -> ListDoc<T> {
    ListDoc(interval(&list.0, x, y).to_vec())
}

pub(crate) fn interval<T>(items: &[T], x: usize, y: usize) -> &[T] {
    if x > y || x >= items.len() {
        return &[];
    }
    let end = y.saturating_add(1).min(items.len());
    &items[x..end]
}

/// `L[<x]`: every element before index `x`.
pub(crate) fn head_before<T>(items: &[T], x: usize) -> &[T] {
    match x.checked_sub(1) {
        Some(last) => interval(items, 0, last),
        None => &[],
    }
}

/// `L[>=x]`: every element from index `x` on.
pub(crate) fn tail_from<T>(items: &[T], x: usize) -> &[T] {
    match items.len().checked_sub(1) {
        Some(last) => interval(items, x, last),
        None => &[],
    }
}

/// True iff `l2` starts with `l1`.
pub fn is_prefix<T: PartialEq>(l1: &ListDoc<T>, l2: &ListDoc<T>) -> bool {
    starts_with(&l2.0, &l1.0)
}

pub(crate) fn starts_with<T: PartialEq>(items: &[T], prefix: &[T]) -> bool {
    prefix.len() <= items.len() && head_before(items, prefix.len()) == prefix
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> ListDoc<char> {
        s.chars().collect()
    }

    #[test]
    fn insert_examples() {
        assert_eq!(insert_l('A', 0, &l("XYZ")).unwrap(), l("AXYZ"));
        assert_eq!(insert_l('b', 1, &l("a")).unwrap(), l("ab"));
        assert_eq!(
            insert_l('a', 2, &l("")),
            Err(ListError::PositionOutOfRange { pos: 2, len: 0 })
        );
    }

    #[test]
    fn delete_examples() {
        assert_eq!(delete_l(1, &l("XYZ")).unwrap(), l("XZ"));
        assert_eq!(delete_l(0, &l("a")).unwrap(), l(""));
        assert!(matches!(delete_l(3, &l("ab")), Err(ListError::PositionOutOfRange { .. })));
    }

    #[test]
    fn slice_examples() {
        assert_eq!(slice(&l("abc"), 0, 1), l("ab"));
        assert_eq!(slice(&l("abc"), 2, 0), l(""));
        assert_eq!(slice(&l("abc"), 1, 9), l("bc"));
        assert_eq!(slice(&l("abc"), 5, 9), l(""));
    }

    #[test]
    fn prefix_examples() {
        let n = |v: &[u32]| ListDoc::from(v.to_vec());
        assert!(is_prefix(&n(&[1, 2]), &n(&[1, 2, 3])));
        assert!(!is_prefix(&n(&[1, 3]), &n(&[1, 2, 3])));
        assert!(is_prefix(&l(""), &l("a")));
        assert!(!is_prefix(&l("ab"), &l("a")));
    }

    fn small_list() -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..3, 0..8)
    }

    proptest! {
        #[test]
        fn delete_undoes_insert(v in small_list(), item in 0u8..3, k in 0usize..9) {
            let list = ListDoc::from(v);
            prop_assume!(k <= list.len());
            let ins = insert_l(item, k, &list).unwrap();
            prop_assert_eq!(ins.len(), list.len() + 1);
            prop_assert_eq!(ins[k], item);
            prop_assert_eq!(delete_l(k, &ins).unwrap(), list);
        }

        #[test]
        fn slices_concatenate(v in small_list(), x in 0usize..8, y in 0usize..8) {
            let list = ListDoc::from(v);
            prop_assume!(!list.is_empty() && x <= y);
            let last = list.len() - 1;
            prop_assert_eq!(slice(&list, 0, last), list.clone());
            let mut joined = slice(&list, x, y).into_vec();
            joined.extend(slice(&list, y + 1, last).into_vec());
            prop_assert_eq!(ListDoc::from(joined), slice(&list, x, last));
        }

        #[test]
        fn prefix_antisymmetric(a in small_list(), b in small_list()) {
            let (a, b) = (ListDoc::from(a), ListDoc::from(b));
            prop_assert!(is_prefix(&a, &a));
            if is_prefix(&a, &b) && is_prefix(&b, &a) {
                prop_assert_eq!(a, b);
            }
        }
    }
}
