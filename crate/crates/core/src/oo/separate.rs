//! Separation of trigger code into managed-bean and service code.

use crate::primitives::Primitive;

/// One entry of the managed-bean method, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub enum BeanItem {
    /// Call to the service method with this 1-based ordinal.
    ServiceCall(usize),
    Ui(Primitive),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Separation {
    pub bean: Vec<BeanItem>,
    /// Primitives of each service method; index 0 has ordinal 1.
    pub services: Vec<Vec<Primitive>>,
}

/// Appends `p` to `sink` and reports whether it modifies the UI, directly or
/// through a nested primitive.
pub fn process_primitive(p: &Primitive, sink: &mut Vec<Primitive>) -> bool {
    sink.push(p.clone());
    moves_to_ui(p)
}

pub fn moves_to_ui(p: &Primitive) -> bool {
    if p.is_modify_ui() {
        return true;
    }
    let mut found = false;
    for list in p.child_lists() {
        for q in list {
            found = moves_to_ui(q) || found;
        }
    }
    found
}

pub fn separate_event_handler(primitives: &[Primitive]) -> Separation {
    let mut sep = Separation::default();
    sep.services.push(Vec::new());
    sep.bean.push(BeanItem::ServiceCall(1));
    for p in primitives {
        let current = sep.services.last_mut().expect("current service method");
        if process_primitive(p, current) {
            let moved = current.pop().expect("statement just added");
            if current.is_empty() {
                // Nothing ran before the UI code: drop the call and reuse the method.
                sep.bean.pop();
                sep.bean.push(BeanItem::Ui(moved));
            } else {
                sep.bean.push(BeanItem::Ui(moved));
                sep.services.push(Vec::new());
            }
            sep.bean.push(BeanItem::ServiceCall(sep.services.len()));
        }
    }
    if sep.services.last().is_some_and(|s| s.is_empty()) {
        sep.services.pop();
        sep.bean.pop();
    }
    sep
}
