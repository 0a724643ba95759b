fn main() {
    println!("rlab: work in progress");
}
