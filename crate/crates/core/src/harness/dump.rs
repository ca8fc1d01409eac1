use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::gadgets::GadgetInstance;
use crate::error::Result;

/// One JSON-lines record of a gadget's read schedule.
#[derive(Debug, Clone, Serialize)]
pub struct TimetableRow {
    pub step: usize,
    /// `before` or `after`.
    pub query_kind: &'static str,
    pub decode_params: Value,
}

pub fn timetable_rows(instance: &GadgetInstance) -> Result<Vec<TimetableRow>> {
    let decoder = serde_json::to_value(instance.decoder)?;
    let mut rows = Vec::new();
    for r in &instance.timetable {
        let params = json!({ "query": r.query, "truth": r.truth, "decoder": decoder });
        if let Some(b) = r.before {
            rows.push(TimetableRow { step: b, query_kind: "before", decode_params: params.clone() });
        }
        rows.push(TimetableRow { step: r.after, query_kind: "after", decode_params: params });
    }
    Ok(rows)
}

pub fn write_timetable<W: Write>(instance: &GadgetInstance, mut out: W) -> Result<()> {
    for row in timetable_rows(instance)? {
        serde_json::to_writer(&mut out, &row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes the stream file and the JSON-lines timetable.
pub fn dump_gadget(instance: &GadgetInstance, stream_path: &Path, timetable_path: &Path) -> Result<()> {
    instance.stream.write_to(BufWriter::new(File::create(stream_path)?))?;
    let mut w = BufWriter::new(File::create(timetable_path)?);
    write_timetable(instance, &mut w)?;
    w.flush()?;
    Ok(())
}
