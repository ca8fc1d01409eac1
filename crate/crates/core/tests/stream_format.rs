use continual_dp::stream::{StreamKind, Update, UpdateStream};
use continual_dp::Error;

#[test]
fn graph_stream_round_trips() {
    let s = UpdateStream::graph(
        4,
        vec![Update::insert_edge(0, 1), Update::Noop, Update::insert_edge(3, 2), Update::delete_edge(1, 0)],
    )
    .unwrap();
    let text = s.to_text();
    assert!(text.starts_with("T=4 h=4 kind=graph\n"));
    assert_eq!(UpdateStream::parse_str(&text).unwrap(), s);
}

#[test]
fn element_stream_with_comments_and_blank_lines() {
    let s = UpdateStream::parse_str("# header next\nT=3 h=5 kind=elements\n+ 4\n\n- 4\nbot\n").unwrap();
    assert_eq!(s.kind(), StreamKind::Elements);
    assert_eq!(s.updates(), &[Update::InsertElement(4), Update::DeleteElement(4), Update::Noop]);
    assert_eq!(s.prefix_frequencies(1).unwrap()[4], 1);
    assert_eq!(s.prefix_frequencies(3).unwrap()[4], 0);
}

fn parse_line(text: &str) -> Option<usize> {
    match UpdateStream::parse_str(text) {
        Err(Error::Parse { line, .. }) => Some(line),
        _ => None,
    }
}

#[test]
fn malformed_inputs_report_lines() {
    assert_eq!(parse_line(""), Some(1));
    assert_eq!(parse_line("T=1 h=3\n+ 1\n"), Some(1));
    assert_eq!(parse_line("T=1 h=3 kind=trees\n+ 1\n"), Some(1));
    assert_eq!(parse_line("T=0 h=3 kind=elements\n"), Some(1));
    assert_eq!(parse_line("T=1 h=3 kind=elements\n* 1\n"), Some(2));
    assert_eq!(parse_line("T=1 h=3 kind=elements\n+ 3\n"), Some(2));
    assert_eq!(parse_line("T=1 h=3 kind=elements\n+ 0 1\n"), Some(2));
    assert_eq!(parse_line("T=1 h=3 kind=graph\n+ 1 1\n"), Some(2));
    assert_eq!(parse_line("T=1 h=3 kind=graph\n+ 1 x\n"), Some(2));
    assert_eq!(parse_line("T=2 h=3 kind=elements\n+ 1\n"), Some(1));
}
