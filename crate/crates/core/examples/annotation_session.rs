//! Drive the event-sourced annotation log directly: record a pair, derive a
//! paraphrase, label it, then replay the log into the same state.

use lexispec::corpus::{EmotionLabel, PairKind};
use lexispec::session::{replay_session, EventLog, EventPayload, ParaphraseMode, SessionHeader, SessionState, Side};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("demo.jsonl");
    let mut log = EventLog::create(&path, &SessionHeader::new("demo", None), true)?;
    let mut state = SessionState::new(Vec::new());

    let script = [
        (
            "p1",
            EventPayload::RecordCreated {
                pair_kind: PairKind::MetaphorVsLiteral,
                term1: "rip.v.04".parse()?,
                sentence1: "The candidate ripped into his opponent.".into(),
                term2: "criticize.v.01".parse()?,
                sentence2: "The candidate criticized his opponent.".into(),
            },
        ),
        (
            "p1",
            EventPayload::ParaphraseCreated {
                new_record_id: "p1-sister".into(),
                mode: ParaphraseMode::Sister,
                base: Side::First,
                synset: "attack.v.02".parse()?,
                sentence: "The candidate attacked his opponent.".into(),
            },
        ),
        (
            "p1-sister",
            EventPayload::EmotionLabeled {
                annotator: "ann".into(),
                label: EmotionLabel::FirstMoreEmotional,
                idempotency_key: Some("ann-1".into()),
            },
        ),
    ];
    for (record, payload) in script {
        // validate, persist, then apply
        state.check(record, &payload)?;
        let event = log.append(record, payload)?;
        state.apply(&event.record_id, &event.payload)?;
        println!("{}", std::fs::read_to_string(&path)?.lines().last().unwrap_or_default());
    }

    let session = replay_session(&path)?;
    let replayed =
        SessionState::from_events(Vec::new(), &session.events).map_err(|(seq, e)| format!("event {seq}: {e}"))?;
    assert_eq!(replayed.records(), state.records());
    println!(
        "replayed {} events into {} records",
        session.events.len(),
        replayed.records().len()
    );
    Ok(())
}
