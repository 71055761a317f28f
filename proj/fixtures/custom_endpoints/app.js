function render(input) {
  const html = `<div>${input}</div>`;
  return html;
}
module.exports = render;
