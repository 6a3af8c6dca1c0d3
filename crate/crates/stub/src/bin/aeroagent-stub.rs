//! Runs the canned-reply stub on a fixed address until killed.
//!
//! Usage: aeroagent-stub [ADDR] [MODE] [REPLY]
//!   ADDR   default 127.0.0.1:11434
//!   MODE   chat | generate-only | malformed | error500   (default chat)
//!   REPLY  assistant text (default "Move(1.0);")

use aeroagent_stub::{chat_body, generate_body, Reply, StubServer};

fn main() -> std::io::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let addr = args.first().map(String::as_str).unwrap_or("127.0.0.1:11434");
    let mode = args.get(1).map(String::as_str).unwrap_or("chat");
    let reply = args.get(2).map(String::as_str).unwrap_or("Move(1.0);");
    let routes = match mode {
        "chat" => vec![("/api/chat", Reply::json(200, chat_body(reply)))],
        "generate-only" => vec![("/api/generate", Reply::json(200, generate_body(reply)))],
        "malformed" => vec![("/api/chat", Reply::json(200, "this is not json"))],
        "error500" => vec![("/api/chat", Reply::json(500, "{\"error\":\"boom\"}"))],
        other => {
            eprintln!("unknown mode {other:?}");
            std::process::exit(2);
        }
    };
    let stub = StubServer::bind(addr, routes)?;
    println!("stub listening on {} ({mode})", stub.base_url());
    loop {
        std::thread::park();
    }
}
