function build(input) {
  const api = { reader: function () { return input; } };
  return `<main>${api}</main>`;
}
module.exports = build;
