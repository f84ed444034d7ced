//! Writes the synthetic CR sample to a file, handy for trying the CLI:
//!
//!     cargo run -p dcv-core --example make_sample -- cr.dcm

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "cr.dcm".to_string());
    let bytes = dcv_core::samples::cr_file_bytes();
    std::fs::write(&path, &bytes).expect("write sample file");
    println!("wrote {} bytes to {path}", bytes.len());
}
