use super::gadgets::{Decoder, GadgetInstance, GadgetProblem, Reading};
use super::instances::InnerProductInstance;
use super::reduction::Statistic;
use crate::error::{param, Result};
use crate::stream::{Update, UpdateStream};

/// Incremental TopK reduction over `n = d` elements and `T = d + 2 m d` steps.
///
/// Element `i` starts at frequency `x_i`; query `j` first inserts the
/// elements with `q_i = 1`, is read, then inserts the rest, so every element
/// gains exactly one per query. An exact oracle decodes `<x, q^j> + 1`.
pub fn build_topk_reduction(inst: &InnerProductInstance) -> Result<GadgetInstance> {
    let d = inst.dimension();
    if d == 0 {
        return Err(param("TopK reduction needs d >= 1"));
    }
    let m = inst.query_count();
    let mut updates = Vec::with_capacity(d + 2 * m * d);
    let mark = |bit: bool, i: usize| if bit { Update::InsertElement(i) } else { Update::Noop };
    updates.extend((0..d).map(|i| mark(inst.x[i], i)));
    let mut timetable = Vec::with_capacity(m);
    for j in 1..=m {
        let q = &inst.queries[j - 1];
        updates.extend((0..d).map(|i| mark(q[i], i)));
        timetable.push(Reading { query: j, before: None, after: updates.len(), truth: inst.answer(j) });
        updates.extend((0..d).map(|i| mark(!q[i], i)));
    }
    Ok(GadgetInstance {
        problem: GadgetProblem::TopK,
        stream: UpdateStream::elements(d, updates)?,
        timetable,
        decoder: Decoder::TopKSlope { n: d },
        statistic: Statistic::TopKPrefix,
        vertex_budget: d,
        step_budget: d + 2 * m * d,
        weight: 1.0,
    })
}
