//! Minimal single-threaded HTTP stub detector for wire-protocol tests.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread::JoinHandle;

pub struct StubDetector {
    pub url: String,
    handle: Option<JoinHandle<Vec<ReceivedRequest>>>,
}

#[derive(Debug)]
pub struct ReceivedRequest {
    pub method: String,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

pub enum StubResponse {
    Ok(&'static str),
    Status(u16),
}

impl StubDetector {
    /// Serves one canned response per expected connection, then stops.
    pub fn start(responses: Vec<StubResponse>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
        let url = format!("http://{}/detect", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut received = Vec::new();
            for response in responses {
                let (mut stream, _) = listener.accept().expect("accept");
                let mut buf = Vec::new();
                let mut chunk = [0u8; 4096];
                let header_end = loop {
                    let n = stream.read(&mut chunk).expect("read");
                    buf.extend_from_slice(&chunk[..n]);
                    if let Some(pos) = find_header_end(&buf) {
                        break pos;
                    }
                    if n == 0 {
                        panic!("connection closed before headers");
                    }
                };
                let headers = String::from_utf8_lossy(&buf[..header_end]).to_string();
                let content_length = header_value(&headers, "content-length")
                    .and_then(|v| v.parse::<usize>().ok())
                    .unwrap_or(0);
                while buf.len() < header_end + 4 + content_length {
                    let n = stream.read(&mut chunk).expect("read body");
                    if n == 0 {
                        break;
                    }
                    buf.extend_from_slice(&chunk[..n]);
                }
                let body = buf[header_end + 4..].to_vec();
                let method = headers
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_string();
                received.push(ReceivedRequest {
                    method,
                    content_type: header_value(&headers, "content-type"),
                    body,
                });
                let reply = match response {
                    StubResponse::Ok(body) => format!(
                        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                        body.len(),
                        body
                    ),
                    StubResponse::Status(code) => format!(
                        "HTTP/1.1 {code} Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
                    ),
                };
                stream.write_all(reply.as_bytes()).expect("write reply");
            }
            received
        });
        StubDetector {
            url,
            handle: Some(handle),
        }
    }

    pub fn finish(mut self) -> Vec<ReceivedRequest> {
        self.handle.take().unwrap().join().expect("stub thread")
    }
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n")
}

fn header_value(headers: &str, name: &str) -> Option<String> {
    headers.lines().find_map(|line| {
        let (k, v) = line.split_once(':')?;
        if k.trim().eq_ignore_ascii_case(name) {
            Some(v.trim().to_string())
        } else {
            None
        }
    })
}
