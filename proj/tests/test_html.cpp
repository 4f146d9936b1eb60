#include <gtest/gtest.h>

#include "coderec/html.hpp"

using namespace coderec;

TEST(DecodeEntities, NamedAndNumeric) {
  EXPECT_EQ(decode_entities("a &lt; b &amp;&amp; c &gt; d"), "a < b && c > d");
  EXPECT_EQ(decode_entities("&quot;x&quot; &apos;y&apos;"), "\"x\" 'y'");
  EXPECT_EQ(decode_entities("line&#xA;next&#10;end"), "line\nnext\nend");
  EXPECT_EQ(decode_entities("&#233;"), "\xC3\xA9");
}

TEST(DecodeEntities, DecodesExactlyOnce) {
  EXPECT_EQ(decode_entities("&amp;lt;"), "&lt;");
  EXPECT_EQ(decode_entities(decode_entities("&amp;lt;")), "<");
}

TEST(DecodeEntities, UnknownOrBrokenEntitiesPassThrough) {
  EXPECT_EQ(decode_entities("&bogus; & &#xZZ; &lt"), "&bogus; & &#xZZ; &lt");
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(is_valid_utf8("plain"));
  EXPECT_TRUE(is_valid_utf8("caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x98\x80"));
  EXPECT_FALSE(is_valid_utf8("\xC3"));
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));      // overlong
  EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));  // surrogate
  EXPECT_FALSE(is_valid_utf8("\xFF"));
}

TEST(Utf8, LengthCountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("caf\xC3\xA9"), 4u);
  EXPECT_EQ(utf8_length(""), 0u);
}

TEST(ExtractCodeBlocks, SingleBlock) {
  auto r = extract_code_blocks("<p>use</p><pre><code>int x = 5;</code></pre>");
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0], "int x = 5;");
  EXPECT_EQ(r.malformed, 0u);
}

TEST(ExtractCodeBlocks, NoBlocks) {
  EXPECT_TRUE(extract_code_blocks("<p>just prose</p>").blocks.empty());
  EXPECT_TRUE(extract_code_blocks("").blocks.empty());
}

TEST(ExtractCodeBlocks, TwoBlocksInDocumentOrder) {
  auto r = extract_code_blocks("<pre><code>first();</code></pre><p>then</p><pre><code>second();</code></pre>");
  ASSERT_EQ(r.blocks.size(), 2u);
  EXPECT_EQ(r.blocks[0], "first();");
  EXPECT_EQ(r.blocks[1], "second();");
}

TEST(ExtractCodeBlocks, InlineCodeIgnored) {
  auto r = extract_code_blocks("<p>Call <code>list.clear()</code> first.</p>");
  EXPECT_TRUE(r.blocks.empty());
  EXPECT_EQ(r.malformed, 0u);
}

TEST(ExtractCodeBlocks, EntitiesDecodedInside) {
  auto r = extract_code_blocks("<pre><code>List&lt;String&gt; a = x &amp;&amp; y;</code></pre>");
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0], "List<String> a = x && y;");
}

TEST(ExtractCodeBlocks, AttributesAndWhitespaceBetweenTags) {
  auto r = extract_code_blocks("<pre class=\"lang-java\">\n<code class=\"x\">a();</code>\n</pre>");
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0], "a();");
}

TEST(ExtractCodeBlocks, MarkupInsideBlockIsStripped) {
  auto r = extract_code_blocks("<pre><code>int <b>x</b> = 1; // &lt;b&gt;</code></pre>");
  ASSERT_EQ(r.blocks.size(), 1u);
  EXPECT_EQ(r.blocks[0], "int x = 1; // <b>");
}

TEST(ExtractCodeBlocks, UnclosedBlockCountedAndSkipped) {
  auto r = extract_code_blocks("<pre><code>never closed");
  EXPECT_TRUE(r.blocks.empty());
  EXPECT_EQ(r.malformed, 1u);

  auto r2 = extract_code_blocks("<pre><code>a();</code><pre><code>b();</code></pre>");
  EXPECT_EQ(r2.malformed, 1u);
  ASSERT_EQ(r2.blocks.size(), 1u);
  EXPECT_EQ(r2.blocks[0], "b();");
}

TEST(ExtractCodeBlocks, CaseInsensitiveTags) {
  auto r = extract_code_blocks("<PRE><CODE>a();</code></PRE>");
  ASSERT_EQ(r.blocks.size(), 1u);
}
