//! Record formatting: one line per verified point in human, JSON, or
//! CSV form. JSON and CSV output carry records only, so they stay
//! machine-readable; summaries go to the human format or stderr.

use quadcong::VerificationRecord;

use crate::Format;

pub const CSV_HEADER: &str =
    "p,d,chi,theorem11_ok,theorem12_vmin,degree_P,method,k_used,elapsed_ms";

pub fn csv_line(r: &VerificationRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.p,
        r.d,
        r.chi,
        r.theorem11_ok,
        r.theorem12_vmin,
        r.degree_p,
        r.method,
        r.k_used,
        r.elapsed_ms
    )
}

pub fn json_line(r: &VerificationRecord) -> String {
    serde_json::to_string(r).expect("record serializes")
}

pub fn human_line(r: &VerificationRecord) -> String {
    format!(
        "p = {:>5}  d = {:>5}  chi = {:+}  theorem11 = {}  vmin = {}  degree_P = {:>6}  method = {:<8}  k = {}  {:>5} ms  [{}]",
        r.p,
        r.d,
        r.chi,
        if r.theorem11_ok { "OK" } else { "FAIL" },
        r.theorem12_vmin,
        r.degree_p,
        r.method,
        r.k_used,
        r.elapsed_ms,
        if r.passes() { "OK" } else { "FAIL" }
    )
}

pub fn emit_records(records: &[VerificationRecord], format: Format) {
    match format {
        Format::Human => {
            for r in records {
                println!("{}", human_line(r));
            }
        }
        Format::Json => {
            for r in records {
                println!("{}", json_line(r));
            }
        }
        Format::Csv => {
            println!("{CSV_HEADER}");
            for r in records {
                println!("{}", csv_line(r));
            }
        }
    }
}
