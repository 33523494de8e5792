//! List operations and their pairwise transformation.

use serde::{Deserialize, Serialize};

use crate::list::{delete_l, insert_l, ListDoc, ListError};
use crate::site::{PriorityPolicy, SiteId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ListOp<T> {
    InsertL { item: T, pos: usize },
    DeleteL { pos: usize },
    NoOp,
}

impl<T> ListOp<T> {
    pub fn is_valid(&self, list: &ListDoc<T>) -> bool {
        match self {
            ListOp::InsertL { pos, .. } => *pos <= list.len(),
            ListOp::DeleteL { pos } => *pos < list.len(),
            ListOp::NoOp => true,
        }
    }
}

pub fn apply_list<T: Clone>(op: &ListOp<T>, list: &ListDoc<T>) -> Result<ListDoc<T>, ListError> {
    match op {
        ListOp::InsertL { item, pos } => insert_l(item.clone(), *pos, list),
        ListOp::DeleteL { pos } => delete_l(*pos, list),
        ListOp::NoOp => Ok(list.clone()),
    }
}

/// Transforms two list operations generated against the same list.
///
/// Returns `(o1', o2')` where `o1'` applies after `o2` and `o2'` after `o1`.
/// Two inserts at the same position are ordered by site: the lower site id
/// keeps its position and the other moves one to the right.
pub fn xform_l<T: Clone>(o1: &ListOp<T>, s1: SiteId, o2: &ListOp<T>, s2: SiteId) -> (ListOp<T>, ListOp<T>) {
    use ListOp::*;

    let ins = |item: &T, pos: usize| InsertL { item: item.clone(), pos };
    match (o1, o2) {
        (NoOp, _) | (_, NoOp) => (o1.clone(), o2.clone()),
        (InsertL { item: i1, pos: k1 }, InsertL { item: i2, pos: k2 }) => {
            let (k1, k2) = (*k1, *k2);
            if k1 < k2 || (k1 == k2 && PriorityPolicy::default().first_wins(s1, s2)) {
                (ins(i1, k1), ins(i2, k2 + 1))
            } else {
                (ins(i1, k1 + 1), ins(i2, k2))
            }
        }
        (InsertL { item, pos: k1 }, DeleteL { pos: k2 }) => {
            let (k1, k2) = (*k1, *k2);
            if k1 > k2 {
                (ins(item, k1 - 1), DeleteL { pos: k2 })
            } else {
                (ins(item, k1), DeleteL { pos: k2 + 1 })
            }
        }
        (DeleteL { pos: k1 }, InsertL { item, pos: k2 }) => {
            let (k1, k2) = (*k1, *k2);
            if k1 < k2 {
                (DeleteL { pos: k1 }, ins(item, k2 - 1))
            } else {
                (DeleteL { pos: k1 + 1 }, ins(item, k2))
            }
        }
        (DeleteL { pos: k1 }, DeleteL { pos: k2 }) => {
            let (k1, k2) = (*k1, *k2);
            if k1 < k2 {
                (DeleteL { pos: k1 }, DeleteL { pos: k2 - 1 })
            } else if k1 > k2 {
                (DeleteL { pos: k1 - 1 }, DeleteL { pos: k2 })
            } else {
                (NoOp, NoOp)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> ListDoc<char> {
        s.chars().collect()
    }

    const S1: SiteId = SiteId(1);
    const S2: SiteId = SiteId(2);

    #[test]
    fn apply_examples() {
        assert_eq!(apply_list(&ListOp::InsertL { item: 'A', pos: 0 }, &l("XYZ")).unwrap(), l("AXYZ"));
        assert_eq!(apply_list(&ListOp::NoOp, &l("ab")).unwrap(), l("ab"));
        assert!(apply_list(&ListOp::DeleteL { pos: 5 }, &l("a")).is_err());
    }

    #[test]
    fn insert_before_delete_shifts_delete() {
        let (a, b) = xform_l(&ListOp::InsertL { item: 'A', pos: 0 }, S1, &ListOp::DeleteL { pos: 1 }, S2);
        assert_eq!(a, ListOp::InsertL { item: 'A', pos: 0 });
        assert_eq!(b, ListOp::DeleteL { pos: 2 });
    }

    #[test]
    fn same_delete_cancels() {
        let r = xform_l::<char>(&ListOp::DeleteL { pos: 2 }, S1, &ListOp::DeleteL { pos: 2 }, S2);
        assert_eq!(r, (ListOp::NoOp, ListOp::NoOp));
    }

    #[test]
    fn equal_inserts_follow_site_priority() {
        let a = ListOp::InsertL { item: 'a', pos: 1 };
        let b = ListOp::InsertL { item: 'b', pos: 1 };
        let (a2, b2) = xform_l(&a, S1, &b, S2);
        assert_eq!(a2, ListOp::InsertL { item: 'a', pos: 1 });
        assert_eq!(b2, ListOp::InsertL { item: 'b', pos: 2 });
        // Oracle: both composition orders on [x,y].
        let base = l("xy");
        let left = apply_list(&b2, &apply_list(&a, &base).unwrap()).unwrap();
        let right = apply_list(&a2, &apply_list(&b, &base).unwrap()).unwrap();
        assert_eq!(left, l("xaby"));
        assert_eq!(right, l("xaby"));
        // mirrored call gives the mirrored pair
        assert_eq!(xform_l(&b, S2, &a, S1), (b2, a2));
    }

    #[test]
    fn noop_passthrough() {
        let r = xform_l::<char>(&ListOp::NoOp, S1, &ListOp::DeleteL { pos: 0 }, S2);
        assert_eq!(r, (ListOp::NoOp, ListOp::DeleteL { pos: 0 }));
    }

    #[test]
    fn op_encoding() {
        let op = ListOp::InsertL { item: 'x', pos: 3 };
        assert_eq!(serde_json::to_string(&op).unwrap(), r#"{"kind":"insert_l","item":"x","pos":3}"#);
        assert_eq!(serde_json::to_string(&ListOp::<char>::NoOp).unwrap(), r#"{"kind":"no_op"}"#);
    }
}
