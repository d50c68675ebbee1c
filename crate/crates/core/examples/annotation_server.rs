//! Start the annotation service on an ephemeral port, post one label over
//! plain HTTP, and shut down.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use lexispec::corpus::load_corpus;
use lexispec::hierarchy::build_graph;
use lexispec::service::{serve, ServeConfig};
use lexispec::wordnet::load_fixture;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let store = tempfile::tempdir()?;
    let db = load_fixture(&fixtures.join("mini.wn"))?;
    let graph = build_graph(&db)?;
    let handle = serve(ServeConfig {
        db: Arc::new(db),
        graph: Arc::new(graph),
        records: load_corpus(&fixtures.join("sample.tsv"))?,
        corpus_ref: Some("sample.tsv".into()),
        listen: "127.0.0.1:0".into(),
        store: store.path().to_path_buf(),
        session: "demo".into(),
        fsync: true,
    })
    .await?;
    let addr = handle.local_addr();
    println!("serving on http://{addr}");

    let body = r#"{"annotator":"demo","label":"first"}"#;
    let request = format!(
        "POST /records/r09/emotion HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\n\
         Idempotency-Key: demo-1\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let reply = tokio::task::spawn_blocking(move || -> std::io::Result<String> {
        let mut stream = std::net::TcpStream::connect(addr)?;
        stream.write_all(request.as_bytes())?;
        let mut reply = String::new();
        stream.read_to_string(&mut reply)?;
        Ok(reply)
    })
    .await??;
    println!("{}", reply.lines().next().unwrap_or_default());
    println!("{}", reply.split("\r\n\r\n").nth(1).unwrap_or_default());

    handle.shutdown().await?;
    Ok(())
}
