//! Helpers shared by the binary-level test suites: locating the binary and
//! repository, spawning `dcv serve`, and a minimal HTTP/1.1 client over
//! loopback (requests never leave the machine).

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dcv"))
}

pub fn repo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../descriptions")
}

/// A running `dcv serve` child killed on drop.
pub struct ServerProcess {
    child: Child,
    pub addr: String,
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn spawn_server(extra_args: &[&str]) -> ServerProcess {
    let mut child = bin()
        .arg("serve")
        .arg("--port")
        .arg("0")
        .arg("--repo")
        .arg(repo_dir())
        .args(extra_args)
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn dcv serve");
    let stdout = child.stdout.take().expect("child stdout");
    let mut lines = BufReader::new(stdout).lines();
    let first = lines
        .next()
        .expect("server prints its address")
        .expect("readable stdout");
    let addr = first
        .strip_prefix("listening on ")
        .unwrap_or_else(|| panic!("unexpected banner {first:?}"))
        .to_string();
    ServerProcess { child, addr }
}

pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).expect("JSON body")
    }
}

/// One-shot HTTP/1.1 request over a fresh loopback connection.
pub fn http_request(addr: &str, method: &str, path: &str, content_type: &str, body: &[u8]) -> HttpResponse {
    let mut stream = TcpStream::connect(addr).expect("connect to dcv serve");
    let mut request = format!(
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Length: {}\r\n",
        body.len()
    );
    if !content_type.is_empty() {
        request.push_str(&format!("Content-Type: {content_type}\r\n"));
    }
    request.push_str("\r\n");
    stream.write_all(request.as_bytes()).unwrap();
    stream.write_all(body).unwrap();
    stream.flush().unwrap();

    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();
    let header_end = raw
        .windows(4)
        .position(|w| w == b"\r\n\r\n")
        .expect("response headers");
    let head = String::from_utf8_lossy(&raw[..header_end]);
    let status: u16 = head
        .lines()
        .next()
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|s| s.parse().ok())
        .expect("status line");
    HttpResponse {
        status,
        body: raw[header_end + 4..].to_vec(),
    }
}

pub fn post_json(addr: &str, path: &str, body: &serde_json::Value) -> HttpResponse {
    http_request(addr, "POST", path, "application/json", body.to_string().as_bytes())
}

pub const MULTIPART_BOUNDARY: &str = "dcvtestboundary";

pub fn upload_file(addr: &str, bytes: &[u8]) -> HttpResponse {
    let mut body = Vec::new();
    body.extend_from_slice(
        format!(
            "--{MULTIPART_BOUNDARY}\r\nContent-Disposition: form-data; name=\"file\"; \
             filename=\"f.dcm\"\r\nContent-Type: application/octet-stream\r\n\r\n"
        )
        .as_bytes(),
    );
    body.extend_from_slice(bytes);
    body.extend_from_slice(format!("\r\n--{MULTIPART_BOUNDARY}--\r\n").as_bytes());
    http_request(
        addr,
        "POST",
        "/configure",
        &format!("multipart/form-data; boundary={MULTIPART_BOUNDARY}"),
        &body,
    )
}
